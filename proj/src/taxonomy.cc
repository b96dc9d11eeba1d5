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

#include "labelrel/taxonomy.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "json.hpp"
#include "labelrel/parallel.h"

namespace labelrel {
namespace {

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

}  // namespace

TaxonomyGraph::TaxonomyGraph(
    std::vector<std::string> synsets,
    std::vector<std::pair<std::string, std::string>> hypernym_edges,
    std::map<std::string, std::string> label_map, bool allow_unmapped)
    : synsets_(std::move(synsets)),
      label_map_(std::move(label_map)),
      allow_unmapped_(allow_unmapped) {
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    if (synsets_[i] == kUnmappedSynset) {
      throw InvalidArgument("synset id " + synsets_[i] + " is reserved");
    }
    if (!index_.emplace(synsets_[i], i).second) {
      throw InvalidArgument("duplicate synset '" + synsets_[i] + "'");
    }
  }
  children_.resize(synsets_.size());
  neighbours_.resize(synsets_.size());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::size_t> in_degree(synsets_.size(), 0);
  for (auto& [parent, child] : hypernym_edges) {
    const std::size_t p = IndexOf(parent);
    const std::size_t c = IndexOf(child);
    if (!seen.emplace(p, c).second) continue;
    children_[p].push_back(c);
    neighbours_[p].push_back(c);
    neighbours_[c].push_back(p);
    ++in_degree[c];
    edges_.emplace_back(std::move(parent), std::move(child));
  }
  // Kahn's algorithm: every node is removed iff the graph has no cycle.
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    if (in_degree[i] == 0) ready.push_back(i);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const std::size_t node = ready.front();
    ready.pop_front();
    ++removed;
    for (std::size_t child : children_[node]) {
      if (--in_degree[child] == 0) ready.push_back(child);
    }
  }
  if (removed != synsets_.size()) {
    throw InvalidArgument("hypernym edges contain a directed cycle");
  }
  for (const auto& [label, synset] : label_map_) {
    if (synset != kUnmappedSynset) IndexOf(synset);
  }
}

std::size_t TaxonomyGraph::IndexOf(std::string_view synset) const {
  auto it = index_.find(synset);
  if (it == index_.end()) {
    throw InvalidArgument("unknown synset '" + std::string(synset) + "'");
  }
  return it->second;
}

std::string TaxonomyGraph::SynsetOf(const QualifiedLabel& label) const {
  const std::string key = label.dataset + "/" + label.label;
  auto it = label_map_.find(key);
  if (it != label_map_.end()) return it->second;
  if (allow_unmapped_) return std::string(kUnmappedSynset);
  throw InvalidArgument("label '" + key + "' has no synset mapping");
}

std::shared_ptr<const std::vector<char>> TaxonomyGraph::Descendants(
    std::size_t node) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = descendants_.find(node); it != descendants_.end()) return it->second;
  }
  auto mask = std::make_shared<std::vector<char>>(synsets_.size(), 0);
  std::vector<std::size_t> stack = children_[node];
  while (!stack.empty()) {
    const std::size_t current = stack.back();
    stack.pop_back();
    if ((*mask)[current]) continue;
    (*mask)[current] = 1;
    for (std::size_t child : children_[current]) stack.push_back(child);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return descendants_.emplace(node, std::move(mask)).first->second;
}

std::shared_ptr<const std::vector<int>> TaxonomyGraph::Distances(
    std::size_t node) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = distances_.find(node); it != distances_.end()) return it->second;
  }
  auto dist = std::make_shared<std::vector<int>>(synsets_.size(), -1);
  std::deque<std::size_t> queue{node};
  (*dist)[node] = 0;
  while (!queue.empty()) {
    const std::size_t current = queue.front();
    queue.pop_front();
    for (std::size_t next : neighbours_[current]) {
      if ((*dist)[next] >= 0) continue;
      (*dist)[next] = (*dist)[current] + 1;
      queue.push_back(next);
    }
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return distances_.emplace(node, std::move(dist)).first->second;
}

RelationType TaxonomyGraph::SynsetRelation(std::string_view s_a,
                                           std::string_view s_b) const {
  if (s_a == kUnmappedSynset || s_b == kUnmappedSynset) return RelationType::kNone;
  const std::size_t a = IndexOf(s_a);
  const std::size_t b = IndexOf(s_b);
  if (a == b) return RelationType::kIdentity;
  const auto below_a = Descendants(a);
  if ((*below_a)[b]) return RelationType::kParent;
  const auto below_b = Descendants(b);
  if ((*below_b)[a]) return RelationType::kChild;
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    if ((*below_a)[i] && (*below_b)[i]) return RelationType::kOverlap;
  }
  return RelationType::kNone;
}

std::optional<std::size_t> TaxonomyGraph::SynsetDistance(std::string_view s_a,
                                                         std::string_view s_b) const {
  if (s_a == kUnmappedSynset || s_b == kUnmappedSynset) return std::nullopt;
  const int d = (*Distances(IndexOf(s_a)))[IndexOf(s_b)];
  if (d < 0) return std::nullopt;
  return static_cast<std::size_t>(d);
}

std::unique_ptr<TaxonomyGraph> ParseTaxonomy(std::string_view text,
                                             std::string_view source,
                                             bool allow_unmapped) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    std::vector<std::pair<std::string, std::string>> edges;
    for (const json& edge : doc.at("hypernym_edges")) {
      if (!edge.is_array() || edge.size() != 2) {
        throw InvalidArgument("hypernym edge must be a [parent, child] pair");
      }
      edges.emplace_back(edge[0].get<std::string>(), edge[1].get<std::string>());
    }
    return std::make_unique<TaxonomyGraph>(
        doc.at("synsets").get<std::vector<std::string>>(), std::move(edges),
        doc.value("label_map", std::map<std::string, std::string>()), allow_unmapped);
  } catch (const json::exception& e) {
    throw IoError(std::string(source) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string(source) + ": " + e.what());
  }
}

RelationType TaxonomyRelation(const TaxonomyGraph& tax, const QualifiedLabel& a,
                              const QualifiedLabel& b) {
  return tax.SynsetRelation(tax.SynsetOf(a), tax.SynsetOf(b));
}

double PathSimilarity(const TaxonomyGraph& tax, const QualifiedLabel& a,
                      const QualifiedLabel& b) {
  const auto d = tax.SynsetDistance(tax.SynsetOf(a), tax.SynsetOf(b));
  if (!d) return 0.0;
  return 1.0 / (1.0 + static_cast<double>(*d));
}

double TaxonomyStrength(const TaxonomyGraph& tax, const QualifiedLabel& a,
                        const QualifiedLabel& b) {
  const RelationType type = TaxonomyRelation(tax, a, b);
  const bool related = type == RelationType::kIdentity ||
                       type == RelationType::kParent ||
                       type == RelationType::kChild || type == RelationType::kOverlap;
  return PathSimilarity(tax, a, b) + (related ? 1.0 : 0.0);
}

TaxonomyPredictions PredictWithTaxonomy(const TaxonomyGraph& tax,
                                        const LabelSpace& space_a,
                                        const LabelSpace& space_b, int parallelism) {
  TaxonomyPredictions out;
  out.strengths = {space_a, space_b, DenseMatrix(space_a.size(), space_b.size())};
  std::vector<RelationType> types(space_a.size() * space_b.size());
  ParallelFor(space_a.size(), parallelism, [&](std::size_t a) {
    const QualifiedLabel qa{space_a.dataset_id(), space_a.label(a)};
    for (std::size_t b = 0; b < space_b.size(); ++b) {
      const QualifiedLabel qb{space_b.dataset_id(), space_b.label(b)};
      out.strengths.values(a, b) = TaxonomyStrength(tax, qa, qb);
      types[a * space_b.size() + b] = TaxonomyRelation(tax, qa, qb);
    }
  });
  for (std::size_t a = 0; a < space_a.size(); ++a) {
    for (std::size_t b = 0; b < space_b.size(); ++b) {
      out.types.emplace(LabelPair{space_a.label(a), space_b.label(b)},
                        types[a * space_b.size() + b]);
    }
  }
  return out;
}

std::vector<std::string> TokenizeLabel(std::string_view label) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : label) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double CosineSimilarity(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("vectors differ in dimension");
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (!(xx > 0.0) || !(yy > 0.0)) {
    throw InvalidArgument("cosine similarity of a zero vector is undefined");
  }
  return dot / (std::sqrt(xx) * std::sqrt(yy));
}

WordEmbeddingTable::WordEmbeddingTable(
    std::map<std::string, std::vector<double>> vectors) {
  for (auto& [token, vec] : vectors) {
    if (vectors_.empty()) dimension_ = vec.size();
    if (vec.size() != dimension_ || vec.empty()) {
      throw InvalidArgument("vector of '" + token + "' has dimension " +
                            std::to_string(vec.size()) + ", expected " +
                            std::to_string(dimension_));
    }
    double norm = 0.0;
    for (double v : vec) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("vector of '" + token + "' has a non-finite entry");
      }
      norm += v * v;
    }
    if (norm == 0.0) throw InvalidArgument("vector of '" + token + "' has zero norm");
    vectors_.emplace(token, std::move(vec));
  }
}

const std::vector<double>* WordEmbeddingTable::Find(std::string_view token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> WordEmbeddingTable::MissingTokens(
    std::string_view label) const {
  std::vector<std::string> missing;
  const std::vector<std::string> tokens = TokenizeLabel(label);
  if (tokens.empty()) missing.push_back(std::string(label));
  for (const std::string& token : tokens) {
    if (Find(token) == nullptr) missing.push_back(token);
  }
  return missing;
}

std::vector<double> WordEmbeddingTable::EmbedLabel(std::string_view label) const {
  const std::vector<std::string> missing = MissingTokens(label);
  if (!missing.empty()) {
    throw InvalidArgument("missing word vectors for: " + Join(missing));
  }
  const std::vector<std::string> tokens = TokenizeLabel(label);
  std::vector<double> mean(dimension_, 0.0);
  for (const std::string& token : tokens) {
    const std::vector<double>& v = *Find(token);
    for (std::size_t i = 0; i < dimension_; ++i) mean[i] += v[i];
  }
  for (double& v : mean) v /= static_cast<double>(tokens.size());
  return mean;
}

WordEmbeddingTable ParseWordVectors(std::string_view text, std::string_view source) {
  std::map<std::string, std::vector<double>> vectors;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    const std::string context =
        std::string(source) + ":" + std::to_string(line_number) + ": ";
    if (tab == std::string::npos || tab == 0) {
      throw IoError(context + "expected 'token<TAB>values'");
    }
    std::string token = line.substr(0, tab);
    std::istringstream values(line.substr(tab + 1));
    std::vector<double> vec;
    std::string field;
    while (values >> field) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size()) {
        throw IoError(context + "'" + field + "' is not a number");
      }
      vec.push_back(v);
    }
    if (!vectors.emplace(token, std::move(vec)).second) {
      throw IoError(context + "duplicate token '" + token + "'");
    }
  }
  try {
    return WordEmbeddingTable(std::move(vectors));
  } catch (const InvalidArgument& e) {
    throw IoError(std::string(source) + ": " + e.what());
  }
}

double EmbeddingSimilarity(const WordEmbeddingTable& table, std::string_view a,
                           std::string_view b) {
  std::vector<std::string> missing = table.MissingTokens(a);
  for (std::string& token : table.MissingTokens(b)) missing.push_back(std::move(token));
  if (!missing.empty()) {
    throw InvalidArgument("missing word vectors for: " + Join(missing));
  }
  return CosineSimilarity(table.EmbedLabel(a), table.EmbedLabel(b));
}

LabeledMatrix EmbeddingSimilarities(const WordEmbeddingTable& table,
                                    const LabelSpace& space_a,
                                    const LabelSpace& space_b) {
  std::vector<std::string> missing;
  for (const LabelSpace* space : {&space_a, &space_b}) {
    for (const std::string& label : space->labels()) {
      for (std::string& token : table.MissingTokens(label)) {
        missing.push_back(std::move(token));
      }
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw InvalidArgument("missing word vectors for: " + Join(missing));
  }
  LabeledMatrix out{space_a, space_b, DenseMatrix(space_a.size(), space_b.size())};
  for (std::size_t a = 0; a < space_a.size(); ++a) {
    const std::vector<double> va = table.EmbedLabel(space_a.label(a));
    for (std::size_t b = 0; b < space_b.size(); ++b) {
      out.values(a, b) = CosineSimilarity(va, table.EmbedLabel(space_b.label(b)));
    }
  }
  return out;
}

}  // namespace labelrel
