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

// Scoring of predicted relations against ground truth: precision-recall
// curves with average precision, per-type accuracy and confusion matrices.

#ifndef LABELREL_EVALUATION_H_
#define LABELREL_EVALUATION_H_

#include <array>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "labelrel/discovery.h"
#include "labelrel/types.h"

namespace labelrel {

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  // One point per group of equal strength, in ranking order.
  std::vector<PrPoint> points;
  // Step-wise area: sum over positives of the precision reached once the
  // positive's strength group has entered, divided by the positive count.
  double average_precision = 0.0;
  std::size_t positives = 0;
};

// `ranked` must list every label pair exactly once in non-increasing strength
// order (as produced by RankPairs). Pairs of equal strength enter the curve
// together. Throws InvalidArgument on duplicates, unsorted input, a positive
// pair missing from the ranking or when there are no positives.
PrCurve ComputePrCurve(std::span<const ScoredPair> ranked,
                       const std::set<LabelPair>& positives);

struct TypeObservation {
  RelationType truth = RelationType::kNone;
  RelationType predicted = RelationType::kNone;
};

// Ground-truth and predicted type of every pair of a_space x b_space; pairs
// absent from a set are `none`. Throws InvalidArgument if either set names a
// label outside the two spaces.
std::vector<TypeObservation> PairTypes(const LabelSpace& a_space,
                                       const LabelSpace& b_space,
                                       const TypedPairSet& predicted,
                                       const TypedPairSet& truth);

struct TypeAccuracy {
  // Recall of every ground-truth type present in the observations.
  std::map<RelationType, double> per_type;
  // Unweighted mean of per_type (0 when there are no observations).
  double macro = 0.0;
};

TypeAccuracy ComputeTypeAccuracy(std::span<const TypeObservation> observations);

// counts[truth][predicted], indexed by the RelationType enumerator value.
using ConfusionMatrix =
    std::array<std::array<std::size_t, kNumRelationTypes>, kNumRelationTypes>;

ConfusionMatrix ComputeConfusion(std::span<const TypeObservation> observations);

}  // namespace labelrel

#endif  // LABELREL_EVALUATION_H_
