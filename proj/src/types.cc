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

#include "labelrel/types.h"

#include <cmath>
#include <utility>

namespace labelrel {

RelationType Mirror(RelationType type) {
  switch (type) {
    case RelationType::kParent:
      return RelationType::kChild;
    case RelationType::kChild:
      return RelationType::kParent;
    default:
      return type;
  }
}

std::string_view ToString(RelationType type) {
  switch (type) {
    case RelationType::kIdentity:
      return "identity";
    case RelationType::kParent:
      return "parent";
    case RelationType::kChild:
      return "child";
    case RelationType::kOverlap:
      return "overlap";
    case RelationType::kPartOf:
      return "part_of";
    case RelationType::kNone:
      return "none";
  }
  return "none";
}

RelationType ParseRelationType(std::string_view name) {
  for (RelationType type : kAllRelationTypes) {
    if (ToString(type) == name) return type;
  }
  if (name == "part-of") return RelationType::kPartOf;
  throw InvalidArgument("unknown relation type '" + std::string(name) + "'");
}

LabelSpace::LabelSpace(std::string dataset_id, std::vector<std::string> labels)
    : dataset_id_(std::move(dataset_id)), labels_(std::move(labels)) {
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const std::string& name = labels_[i];
    if (name.empty()) {
      throw InvalidArgument("dataset '" + dataset_id_ + "': empty label name");
    }
    if (name == kBackgroundLabel) {
      throw InvalidArgument("dataset '" + dataset_id_ +
                            "': label may not use the reserved name " +
                            std::string(kBackgroundLabel));
    }
    if (!index_.emplace(name, i).second) {
      throw InvalidArgument("dataset '" + dataset_id_ + "': duplicate label '" +
                            name + "'");
    }
  }
}

std::optional<std::size_t> LabelSpace::IndexOf(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelSpace::IndexOrThrow(std::string_view name) const {
  if (auto index = IndexOf(name)) return *index;
  throw InvalidArgument("label '" + std::string(name) +
                        "' is not in label space '" + dataset_id_ + "'");
}

DenseMatrix DenseMatrix::Transposed() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

double LabeledMatrix::At(std::string_view row_label,
                         std::string_view col_label) const {
  return values(row_space.IndexOrThrow(row_label),
                col_space.IndexOrThrow(col_label));
}

LabeledMatrix LabeledMatrix::Transposed() const {
  return LabeledMatrix{col_space, row_space, values.Transposed()};
}

double DirectionalScoreMatrix::At(std::string_view from_label,
                                  std::string_view to_label) const {
  return values(from_space.IndexOrThrow(from_label),
                to_space.IndexOrThrow(to_label));
}

std::size_t DirectionalScoreMatrix::Support(std::string_view to_label) const {
  return support.at(to_space.IndexOrThrow(to_label));
}

void RelationGraph::AddEdge(const std::string& a, const std::string& b,
                            RelationEdge edge) {
  if (a == kBackgroundLabel || b == kBackgroundLabel) {
    throw InvalidArgument("background cannot be a relation endpoint");
  }
  if (!std::isfinite(edge.strength) || edge.strength < 0.0) {
    throw InvalidArgument("edge (" + a + ", " + b +
                          ") has a negative or non-finite strength");
  }
  if (!edges_.emplace(LabelPair{a, b}, edge).second) {
    throw InvalidArgument("duplicate edge (" + a + ", " + b + ")");
  }
}

void RelationGraph::SetEdge(const LabelPair& pair, RelationEdge edge) {
  auto it = edges_.find(pair);
  if (it == edges_.end()) {
    throw InvalidArgument("no edge (" + pair.a + ", " + pair.b + ")");
  }
  it->second = edge;
}

bool RelationGraph::HasEdge(std::string_view a, std::string_view b) const {
  return FindEdge(a, b) != nullptr;
}

const RelationEdge* RelationGraph::FindEdge(std::string_view a,
                                            std::string_view b) const {
  auto it = edges_.find(LabelPair{std::string(a), std::string(b)});
  return it == edges_.end() ? nullptr : &it->second;
}

RelationGraph RelationGraph::Mirrored() const {
  RelationGraph out(space_b_, space_a_);
  for (const auto& [pair, edge] : edges_) {
    RelationEdge mirrored = edge;
    if (edge.type) mirrored.type = Mirror(*edge.type);
    out.edges_.emplace(LabelPair{pair.b, pair.a}, mirrored);
  }
  return out;
}

TypedPairSet RelationGraph::TypedPairs() const {
  TypedPairSet out;
  for (const auto& [pair, edge] : edges_) {
    if (edge.type) out.emplace(pair, *edge.type);
  }
  return out;
}

void RelationGraph::CheckLabels(const LabelSpace& a, const LabelSpace& b) const {
  for (const auto& [pair, edge] : edges_) {
    a.IndexOrThrow(pair.a);
    b.IndexOrThrow(pair.b);
  }
}

std::string_view ToString(ScoreMode mode) {
  return mode == ScoreMode::kPixelProbability ? "pixel-probability"
                                              : "embedding-1nn";
}

ScoreMode ParseScoreMode(std::string_view name) {
  if (name == "pixel-probability" || name == "pixel_probability") {
    return ScoreMode::kPixelProbability;
  }
  if (name == "embedding-1nn" || name == "embedding_1nn" || name == "embedding") {
    return ScoreMode::kEmbedding1nn;
  }
  throw InvalidArgument("unknown score mode '" + std::string(name) + "'");
}

std::string_view ToString(AggregationMode mode) {
  return mode == AggregationMode::kMean ? "mean" : "max";
}

AggregationMode ParseAggregationMode(std::string_view name) {
  if (name == "mean") return AggregationMode::kMean;
  if (name == "max") return AggregationMode::kMax;
  throw InvalidArgument("unknown aggregation mode '" + std::string(name) + "'");
}

void PipelineConfig::Validate() const {
  const double values[] = {relation_threshold, asymmetry_T, taxonomy_boost_n,
                           taxonomy_T_factor_m, easy_threshold};
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("thresholds must be finite");
  }
  if (asymmetry_T <= 1.0) throw InvalidArgument("asymmetry T must be > 1");
  if (taxonomy_boost_n < 1.0) throw InvalidArgument("n must be >= 1");
  if (taxonomy_T_factor_m < 1.0) throw InvalidArgument("m must be >= 1");
  if (parallelism < 1) throw InvalidArgument("parallelism must be positive");
}

}  // namespace labelrel
