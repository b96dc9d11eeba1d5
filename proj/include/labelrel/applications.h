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

// Downstream uses of discovered relations: link strength as a predictor of
// transfer gains, fine-grained relabeling of parent-class instances and
// clustering of instance embeddings across two datasets.

#ifndef LABELREL_APPLICATIONS_H_
#define LABELREL_APPLICATIONS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

struct LinkStrength {
  double value = 0.0;
  // Number of source labels related to the target label.
  std::size_t related = 0;
  // Set when no source label is related; value is then 0.
  bool empty = false;
};

// s_b: mean of S_ab[a][b] over the labels a related to b. With a type filter
// only edges of those types count.
LinkStrength ComputeLinkStrength(const DirectionalScoreMatrix& s_ab,
                                 const RelationGraph& relations, std::string_view b,
                                 const std::optional<std::set<RelationType>>& types =
                                     std::nullopt);

struct TransferGainRecord {
  std::string target_label;
  double gain = 0.0;
};

struct GainGroups {
  std::vector<std::string> low_labels;
  std::vector<std::string> mid_labels;
  std::vector<std::string> top_labels;
  double low = 0.0;
  // Absent when the middle group is empty.
  std::optional<double> mid;
  double top = 0.0;
};

// Orders labels by ascending strength (ties by name) and averages the gains
// of the n weakest, the n strongest and the rest. Throws InvalidArgument when
// n < 1, 2n exceeds the label count, or a label has no gain.
GainGroups GroupGains(const std::map<std::string, double>& strengths,
                      std::span<const TransferGainRecord> gains, std::size_t n);

struct RefinementResult {
  // Children of the parent label, sorted.
  std::vector<std::string> children;
  // (instance_id, fine label) in input order.
  std::vector<std::pair<std::string, std::string>> labels;
  // Filled when reference labels are given: counts[(reference, predicted)].
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;
  std::optional<double> top1_accuracy;
};

// Assigns each instance of `parent` (records with another true label are
// ignored) the highest-scoring foreign label among the parent's children,
// i.e. labels b with a `parent` edge (parent, b). Ties go to the smaller
// name. Throws InvalidArgument if the parent has no children.
RefinementResult RefineLabels(const std::string& parent,
                              std::span<const InstanceScoreRecord> records,
                              const RelationGraph& relations,
                              const std::map<std::string, std::string>* reference =
                                  nullptr);

struct ClusteringResult {
  // Cluster of every record, in input order.
  std::vector<std::size_t> assignment;
  // Distinct source datasets, sorted; columns of `composition`.
  std::vector<std::string> datasets;
  // composition[cluster][dataset] = number of records.
  std::vector<std::vector<std::size_t>> composition;
  std::size_t iterations = 0;
};

inline constexpr std::uint64_t kDefaultClusterSeed = 17;

// Lloyd's k-means with k-means++ seeding from a fixed seed. Throws
// InvalidArgument when k is 0 or larger than the number of records.
ClusteringResult ClusterEmbeddings(std::span<const EmbeddingRecord> records,
                                   std::size_t k,
                                   std::uint64_t seed = kDefaultClusterSeed,
                                   std::size_t max_iterations = 300);

}  // namespace labelrel

#endif  // LABELREL_APPLICATIONS_H_
