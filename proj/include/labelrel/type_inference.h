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

// Relation typing: set-theory rules over the binary relation graph, the
// score-asymmetry rule, and the combination with taxonomy predictions.
// Threshold calibration against reference types lives here as well.

#ifndef LABELREL_TYPE_INFERENCE_H_
#define LABELREL_TYPE_INFERENCE_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

// Types every edge from the degree structure of the graph, assuming labels
// within one dataset are mutually exclusive. Rules, in order, for (a, b):
//   identity  a and b have no other edge;
//   parent    b has no other edge, and a has another neighbour that has no
//             other edge (child: the same with roles swapped);
//   overlap   both a and b have other edges;
//   relaxed   otherwise the endpoint with degree >= 2 becomes parent (or
//             child) of the degree-1 endpoint; the edge is marked relaxed.
RelationGraph SetTheoryTypes(const RelationGraph& graph);

// parent if s_ab / s_ba > T, child if s_ba / s_ab > T, else identity. A zero
// denominator with a positive numerator counts as an infinite ratio. Throws
// InvalidArgument when both scores are 0.
RelationType AsymmetryType(double s_ab, double s_ba, double T);

// Applies AsymmetryType to every edge (a, b) with s_ab = S_ab[a][b] and
// s_ba = S_ba[b][a]. Never produces overlap.
RelationGraph AsymmetryTypes(const RelationGraph& graph,
                             const DirectionalScoreMatrix& s_ab,
                             const DirectionalScoreMatrix& s_ba, double T);

// True for the taxonomy types that count as "related".
bool IsRelatedType(RelationType type);

// Multiplies R[a][b] by n wherever the taxonomy relates a and b.
LabeledMatrix CombineStrengths(const LabeledMatrix& link_scores,
                               const TypedPairSet& taxonomy, double n);

// T * m for taxonomy identity, T / m for taxonomy parent or child, T otherwise.
double EffectiveThreshold(double T, std::optional<RelationType> taxonomy_type,
                          double m);

// Asymmetry typing with the per-edge effective threshold.
RelationGraph CombineTypes(const RelationGraph& graph,
                           const DirectionalScoreMatrix& s_ab,
                           const DirectionalScoreMatrix& s_ba, double T,
                           const TypedPairSet& taxonomy, double m);

enum class TypingMethod { kSetTheory, kAsymmetry, kCombined };
std::string_view ToString(TypingMethod method);
TypingMethod ParseTypingMethod(std::string_view name);

enum class CalibrationParameter { kRelationThreshold, kAsymmetryT };
std::string_view ToString(CalibrationParameter parameter);
CalibrationParameter ParseCalibrationParameter(std::string_view name);

// Everything needed to turn scores into a full typed prediction.
struct TypingInputs {
  LabeledMatrix link_scores;
  // Required by the asymmetry and combined methods.
  std::optional<DirectionalScoreMatrix> s_ab;
  std::optional<DirectionalScoreMatrix> s_ba;
  TypingMethod method = TypingMethod::kSetTheory;
  double relation_threshold = 0.25;
  double asymmetry_T = 2.0;
  double taxonomy_T_factor_m = 2.0;
  // Used by the combined method.
  TypedPairSet taxonomy;
};

// Binarizes the link scores and types the edges with the chosen method.
RelationGraph PredictRelations(const TypingInputs& inputs);

struct CalibrationResult {
  double best_value = 0.0;
  double accuracy = 0.0;
  // Macro type accuracy of every candidate, in candidate order.
  std::vector<std::pair<double, double>> table;
};

// Picks the candidate value of `parameter` with the highest macro type
// accuracy against `reference` over all label pairs (missing pairs are
// `none`). Ties go to the smallest candidate. Throws InvalidArgument for an
// empty candidate list.
CalibrationResult Calibrate(std::span<const double> candidates,
                            CalibrationParameter parameter,
                            const TypingInputs& inputs,
                            const TypedPairSet& reference);

// "start:stop:step" (inclusive stop) or a comma separated list of values.
std::vector<double> ParseGrid(std::string_view text);

}  // namespace labelrel

#endif  // LABELREL_TYPE_INFERENCE_H_
