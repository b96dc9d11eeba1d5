/*
 * Copyright 2026 Google LLC.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Language-side relation prediction: relations and path similarity inside a
// hypernym taxonomy, and cosine similarity of word embeddings.

#ifndef LABELREL_TAXONOMY_H_
#define LABELREL_TAXONOMY_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

// Label-map target for labels without a plausible synset. Such labels are
// related to nothing and have similarity 0.
inline constexpr std::string_view kUnmappedSynset = "__unmapped__";

struct QualifiedLabel {
  std::string dataset;
  std::string label;
};

// Directed acyclic hypernym graph with a (dataset, label) -> synset mapping.
// Immutable after construction; queries are safe from several threads.
class TaxonomyGraph {
 public:
  // Throws InvalidArgument on duplicate synsets, edges naming unknown
  // synsets, directed cycles, or label-map targets that are not synsets
  // (kUnmappedSynset excepted). Label-map keys are "dataset/label". With
  // `allow_unmapped`, labels missing from the map behave as kUnmappedSynset.
  TaxonomyGraph(std::vector<std::string> synsets,
                std::vector<std::pair<std::string, std::string>> hypernym_edges,
                std::map<std::string, std::string> label_map,
                bool allow_unmapped = false);

  TaxonomyGraph(const TaxonomyGraph&) = delete;
  TaxonomyGraph& operator=(const TaxonomyGraph&) = delete;

  const std::vector<std::string>& synsets() const { return synsets_; }
  const std::vector<std::pair<std::string, std::string>>& hypernym_edges() const {
    return edges_;
  }

  // Synset id of a label, or kUnmappedSynset. Throws InvalidArgument naming the
  // label if it is not mapped and unmapped labels are not allowed.
  std::string SynsetOf(const QualifiedLabel& label) const;

  // identity / parent / child / overlap / none between two synset ids.
  RelationType SynsetRelation(std::string_view s_a, std::string_view s_b) const;
  // Shortest undirected path length over hypernym edges; empty if
  // disconnected or either synset is unmapped.
  std::optional<std::size_t> SynsetDistance(std::string_view s_a,
                                            std::string_view s_b) const;

 private:
  std::size_t IndexOf(std::string_view synset) const;
  // Strict descendants of a synset, as a membership mask. Memoized.
  std::shared_ptr<const std::vector<char>> Descendants(std::size_t node) const;
  // Undirected BFS distances from a synset (-1 when unreachable). Memoized.
  std::shared_ptr<const std::vector<int>> Distances(std::size_t node) const;

  std::vector<std::string> synsets_;
  std::vector<std::pair<std::string, std::string>> edges_;
  std::map<std::string, std::string> label_map_;
  bool allow_unmapped_ = false;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<std::size_t>> neighbours_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const std::vector<char>>> descendants_;
  mutable std::map<std::size_t, std::shared_ptr<const std::vector<int>>> distances_;
};

// taxonomy.json: {"synsets": [...], "hypernym_edges": [[parent, child], ...],
//                 "label_map": {"dataset/label": synset}}
std::unique_ptr<TaxonomyGraph> ParseTaxonomy(std::string_view text,
                                             std::string_view source,
                                             bool allow_unmapped = false);

RelationType TaxonomyRelation(const TaxonomyGraph& tax, const QualifiedLabel& a,
                              const QualifiedLabel& b);
// 1 / (1 + d) for path length d, 0 when disconnected.
double PathSimilarity(const TaxonomyGraph& tax, const QualifiedLabel& a,
                      const QualifiedLabel& b);
// Path similarity plus 1 when the taxonomy relates the two labels.
double TaxonomyStrength(const TaxonomyGraph& tax, const QualifiedLabel& a,
                        const QualifiedLabel& b);

struct TaxonomyPredictions {
  LabeledMatrix strengths;
  // Type of every pair of the two spaces, `none` included.
  TypedPairSet types;
};

TaxonomyPredictions PredictWithTaxonomy(const TaxonomyGraph& tax,
                                        const LabelSpace& space_a,
                                        const LabelSpace& space_b,
                                        int parallelism = 1);

// Lowercased runs of ASCII letters and digits: "Potted plant" -> {potted, plant}.
std::vector<std::string> TokenizeLabel(std::string_view label);

double CosineSimilarity(std::span<const double> x, std::span<const double> y);

// Token -> vector table (word_vectors.tsv: token TAB float ... float).
class WordEmbeddingTable {
 public:
  WordEmbeddingTable() = default;
  // Throws InvalidArgument on mixed dimensions, zero-norm or non-finite vectors.
  explicit WordEmbeddingTable(std::map<std::string, std::vector<double>> vectors);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  const std::vector<double>* Find(std::string_view token) const;

  // Mean of the label's token vectors. Throws InvalidArgument listing every
  // missing token.
  std::vector<double> EmbedLabel(std::string_view label) const;
  // Tokens of `label` absent from the table.
  std::vector<std::string> MissingTokens(std::string_view label) const;

 private:
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
  std::size_t dimension_ = 0;
};

WordEmbeddingTable ParseWordVectors(std::string_view text, std::string_view source);

// Cosine similarity of two label embeddings. Throws InvalidArgument listing
// the missing tokens of both labels.
double EmbeddingSimilarity(const WordEmbeddingTable& table, std::string_view a,
                           std::string_view b);

LabeledMatrix EmbeddingSimilarities(const WordEmbeddingTable& table,
                                    const LabelSpace& space_a,
                                    const LabelSpace& space_b);

}  // namespace labelrel

#endif  // LABELREL_TAXONOMY_H_
