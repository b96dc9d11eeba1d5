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

// Shared data model: label spaces, per-instance score records, dense score
// matrices and relation graphs between two label spaces.

#ifndef LABELREL_TYPES_H_
#define LABELREL_TYPES_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace labelrel {

// Reserved name of the "none of my labels" class inside score vectors.
inline constexpr std::string_view kBackgroundLabel = "__background__";

// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs violate a precondition (bad label, bad shape, bad parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read, written or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class RelationType { kIdentity, kParent, kChild, kOverlap, kPartOf, kNone };

inline constexpr RelationType kAllRelationTypes[] = {
    RelationType::kIdentity, RelationType::kParent,  RelationType::kChild,
    RelationType::kOverlap,  RelationType::kPartOf, RelationType::kNone};
inline constexpr std::size_t kNumRelationTypes = 6;

// Type of (b, a) given the type of (a, b). part_of has no inverse in the
// enumeration and maps to itself.
RelationType Mirror(RelationType type);

std::string_view ToString(RelationType type);
// Accepts the names produced by ToString. Throws InvalidArgument otherwise.
RelationType ParseRelationType(std::string_view name);

// Ordered pair of label names (a from the first space, b from the second).
struct LabelPair {
  std::string a;
  std::string b;

  auto operator<=>(const LabelPair&) const = default;
  bool operator==(const LabelPair&) const = default;
};

using TypedPairSet = std::map<LabelPair, RelationType>;

// The named labels of one dataset. The background label is implicit.
class LabelSpace {
 public:
  LabelSpace() = default;
  // Throws InvalidArgument on duplicate names, empty names or a label equal to
  // the background name.
  LabelSpace(std::string dataset_id, std::vector<std::string> labels);

  const std::string& dataset_id() const { return dataset_id_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  bool Contains(std::string_view name) const { return IndexOf(name).has_value(); }
  // Throws InvalidArgument naming the label and the dataset.
  std::size_t IndexOrThrow(std::string_view name) const;

  bool operator==(const LabelSpace& other) const {
    return dataset_id_ == other.dataset_id_ && labels_ == other.labels_;
  }

 private:
  std::string dataset_id_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One annotated instance of the source dataset, scored by the model of the
// foreign dataset. self_score is the own-dataset model's probability of the
// true label.
struct InstanceScoreRecord {
  std::string instance_id;
  std::string source_dataset;
  std::string true_label;
  double self_score = 0.0;
  std::map<std::string, double> foreign_scores;

  bool operator==(const InstanceScoreRecord&) const = default;
};

struct EmbeddingRecord {
  std::string instance_id;
  std::string true_label;
  std::vector<double> vector;
  // Optional; used when records of two datasets are mixed (clustering).
  std::string source_dataset;

  bool operator==(const EmbeddingRecord&) const = default;
};

// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  const std::vector<double>& data() const { return data_; }

  DenseMatrix Transposed() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A matrix whose rows are the labels of one space and whose columns are the
// labels of another. Used for link scores R[a][b] and language similarities.
struct LabeledMatrix {
  LabelSpace row_space;
  LabelSpace col_space;
  DenseMatrix values;

  // Throws InvalidArgument if either label is unknown.
  double At(std::string_view row_label, std::string_view col_label) const;
  LabeledMatrix Transposed() const;

  bool operator==(const LabeledMatrix&) const = default;
};

// S_{a->b}: mean probability that instances of column label b are called row
// label a by the model of the row space. support[b] is the number of
// instances that entered column b.
struct DirectionalScoreMatrix {
  LabelSpace from_space;  // rows; the scoring model's label space
  LabelSpace to_space;    // columns; the label space of the scored instances
  DenseMatrix values;
  std::vector<std::size_t> support;
  // Column labels with no contributing instance. Their cells are 0.
  std::vector<std::string> zero_support;

  double At(std::string_view from_label, std::string_view to_label) const;
  std::size_t Support(std::string_view to_label) const;

  bool operator==(const DirectionalScoreMatrix&) const = default;
};

struct RelationEdge {
  double strength = 0.0;
  // Empty for untyped edges.
  std::optional<RelationType> type;
  // Set when the type came from the relaxed set-theory fallback.
  bool relaxed = false;
  // Number of supporting instances, when the edge was derived from counts.
  std::optional<std::size_t> count;

  bool operator==(const RelationEdge&) const = default;
};

// Set of relations between the labels of space_a and space_b. Edges are kept
// ordered by (a, b) so iteration order does not depend on insertion order.
class RelationGraph {
 public:
  RelationGraph() = default;
  RelationGraph(std::string space_a, std::string space_b)
      : space_a_(std::move(space_a)), space_b_(std::move(space_b)) {}

  const std::string& space_a() const { return space_a_; }
  const std::string& space_b() const { return space_b_; }

  // Throws InvalidArgument on a duplicate pair, a background endpoint or a
  // negative / non-finite strength.
  void AddEdge(const std::string& a, const std::string& b, RelationEdge edge);
  // Replaces the attributes of an existing edge.
  void SetEdge(const LabelPair& pair, RelationEdge edge);

  bool HasEdge(std::string_view a, std::string_view b) const;
  const RelationEdge* FindEdge(std::string_view a, std::string_view b) const;
  const std::map<LabelPair, RelationEdge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  // Swaps the roles of the two spaces: (a, b, t) becomes (b, a, Mirror(t)).
  RelationGraph Mirrored() const;
  // Typed edges as a pair set; untyped edges are skipped.
  TypedPairSet TypedPairs() const;
  // Throws InvalidArgument if an endpoint is not a label of its space.
  void CheckLabels(const LabelSpace& a, const LabelSpace& b) const;

  bool operator==(const RelationGraph&) const = default;

 private:
  std::string space_a_;
  std::string space_b_;
  std::map<LabelPair, RelationEdge> edges_;
};

enum class ScoreMode { kPixelProbability, kEmbedding1nn };
enum class AggregationMode { kMean, kMax };

std::string_view ToString(ScoreMode mode);
ScoreMode ParseScoreMode(std::string_view name);
std::string_view ToString(AggregationMode mode);
AggregationMode ParseAggregationMode(std::string_view name);

struct PipelineConfig {
  double relation_threshold = 0.25;
  double asymmetry_T = 2.0;
  double taxonomy_boost_n = 2.0;
  double taxonomy_T_factor_m = 2.0;
  double easy_threshold = 0.5;
  AggregationMode aggregation_mode = AggregationMode::kMean;
  int parallelism = 1;

  // Throws InvalidArgument when an invariant does not hold.
  void Validate() const;
};

}  // namespace labelrel

#endif  // LABELREL_TYPES_H_
