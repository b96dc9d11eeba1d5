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

#ifndef LABELREL_DISCOVERY_H_
#define LABELREL_DISCOVERY_H_

#include <string>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

// R[a][b] = (S_ab[a][b] + S_ba[b][a]) / 2. `s_ab` has rows A and columns B;
// `s_ba` has rows B and columns A. Throws InvalidArgument when the label
// spaces of the two matrices do not mirror each other.
LabeledMatrix LinkScores(const DirectionalScoreMatrix& s_ab,
                         const DirectionalScoreMatrix& s_ba);

// Untyped edge (a, b) with strength R[a][b] for every cell with
// R[a][b] > threshold.
RelationGraph Binarize(const LabeledMatrix& link_scores, double threshold);

struct ScoredPair {
  std::string a;
  std::string b;
  double strength = 0.0;

  bool operator==(const ScoredPair&) const = default;
};

// Every (a, b) cell, by descending strength, ties by (a, b).
std::vector<ScoredPair> RankPairs(const LabeledMatrix& link_scores);

}  // namespace labelrel

#endif  // LABELREL_DISCOVERY_H_
