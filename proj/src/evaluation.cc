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

#include "labelrel/evaluation.h"

namespace labelrel {

PrCurve ComputePrCurve(std::span<const ScoredPair> ranked,
                       const std::set<LabelPair>& positives) {
  std::set<LabelPair> seen;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!seen.insert(LabelPair{ranked[i].a, ranked[i].b}).second) {
      throw InvalidArgument("pair (" + ranked[i].a + ", " + ranked[i].b +
                            ") is ranked twice");
    }
    if (i > 0 && ranked[i].strength > ranked[i - 1].strength) {
      throw InvalidArgument("ranking is not in non-increasing strength order");
    }
  }
  for (const LabelPair& p : positives) {
    if (!seen.contains(p)) {
      throw InvalidArgument("ground-truth pair (" + p.a + ", " + p.b +
                            ") is not among the ranked label pairs");
    }
  }
  if (positives.empty()) {
    throw InvalidArgument("no ground-truth positives; recall is undefined");
  }

  PrCurve curve;
  curve.positives = positives.size();
  const double total = static_cast<double>(positives.size());
  std::size_t retrieved = 0;
  std::size_t hits = 0;
  std::size_t i = 0;
  while (i < ranked.size()) {
    std::size_t group_hits = 0;
    std::size_t j = i;
    while (j < ranked.size() && ranked[j].strength == ranked[i].strength) {
      if (positives.contains(LabelPair{ranked[j].a, ranked[j].b})) ++group_hits;
      ++j;
    }
    retrieved += j - i;
    hits += group_hits;
    const double precision =
        static_cast<double>(hits) / static_cast<double>(retrieved);
    curve.average_precision += static_cast<double>(group_hits) * precision;
    curve.points.push_back({static_cast<double>(hits) / total, precision});
    i = j;
  }
  curve.average_precision /= total;
  return curve;
}

std::vector<TypeObservation> PairTypes(const LabelSpace& a_space,
                                       const LabelSpace& b_space,
                                       const TypedPairSet& predicted,
                                       const TypedPairSet& truth) {
  for (const TypedPairSet* set : {&predicted, &truth}) {
    for (const auto& [pair, type] : *set) {
      a_space.IndexOrThrow(pair.a);
      b_space.IndexOrThrow(pair.b);
    }
  }
  auto lookup = [](const TypedPairSet& set, const LabelPair& pair) {
    auto it = set.find(pair);
    return it == set.end() ? RelationType::kNone : it->second;
  };
  std::vector<TypeObservation> out;
  out.reserve(a_space.size() * b_space.size());
  for (const std::string& a : a_space.labels()) {
    for (const std::string& b : b_space.labels()) {
      const LabelPair pair{a, b};
      out.push_back({lookup(truth, pair), lookup(predicted, pair)});
    }
  }
  return out;
}

TypeAccuracy ComputeTypeAccuracy(std::span<const TypeObservation> observations) {
  const ConfusionMatrix counts = ComputeConfusion(observations);
  TypeAccuracy result;
  for (RelationType type : kAllRelationTypes) {
    const auto t = static_cast<std::size_t>(type);
    std::size_t row_total = 0;
    for (std::size_t count : counts[t]) row_total += count;
    if (row_total == 0) continue;
    result.per_type[type] =
        static_cast<double>(counts[t][t]) / static_cast<double>(row_total);
  }
  if (!result.per_type.empty()) {
    double sum = 0.0;
    for (const auto& [type, recall] : result.per_type) sum += recall;
    result.macro = sum / static_cast<double>(result.per_type.size());
  }
  return result;
}

ConfusionMatrix ComputeConfusion(std::span<const TypeObservation> observations) {
  ConfusionMatrix counts{};
  for (const TypeObservation& o : observations) {
    ++counts[static_cast<std::size_t>(o.truth)][static_cast<std::size_t>(o.predicted)];
  }
  return counts;
}

}  // namespace labelrel
