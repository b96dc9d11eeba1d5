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

#include "labelrel/validate.h"

#include <cmath>
#include <set>
#include <sstream>

namespace labelrel {
namespace {

bool InUnitInterval(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

std::string Describe(double value) {
  std::ostringstream out;
  out.precision(9);
  out << value;
  return out.str();
}

}  // namespace

std::string_view ToString(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUnknownTrueLabel:
      return "unknown_true_label";
    case ViolationKind::kUnknownForeignLabel:
      return "unknown_foreign_label";
    case ViolationKind::kOutOfRange:
      return "out_of_range";
    case ViolationKind::kNotNormalized:
      return "not_normalized";
    case ViolationKind::kNotOneHot:
      return "not_one_hot";
    case ViolationKind::kDuplicateInstance:
      return "duplicate_instance";
  }
  return "unknown";
}

std::vector<Violation> ValidateInputs(const LabelSpace& foreign_space,
                                      const LabelSpace& instance_space,
                                      std::span<const InstanceScoreRecord> records,
                                      ScoreMode mode) {
  std::vector<Violation> report;
  std::set<std::string> seen;
  for (const InstanceScoreRecord& record : records) {
    const std::string& id = record.instance_id;
    auto add = [&](ViolationKind kind, std::string message) {
      report.push_back({id, kind, std::move(message)});
    };
    if (!seen.insert(id).second) {
      add(ViolationKind::kDuplicateInstance, "instance id appears more than once");
    }
    if (!instance_space.Contains(record.true_label)) {
      add(ViolationKind::kUnknownTrueLabel,
          "true label '" + record.true_label + "' not in '" +
              instance_space.dataset_id() + "'");
    }
    if (!InUnitInterval(record.self_score)) {
      add(ViolationKind::kOutOfRange,
          "self_score " + Describe(record.self_score) + " outside [0,1]");
    } else if (mode == ScoreMode::kEmbedding1nn && record.self_score != 0.0 &&
               record.self_score != 1.0) {
      add(ViolationKind::kNotOneHot,
          "self_score " + Describe(record.self_score) + " is not binary");
    }

    double sum = 0.0;
    int ones = 0;
    bool binary = true;
    for (const auto& [label, p] : record.foreign_scores) {
      if (label != kBackgroundLabel && !foreign_space.Contains(label)) {
        add(ViolationKind::kUnknownForeignLabel,
            "foreign label '" + label + "' not in '" +
                foreign_space.dataset_id() + "'");
      }
      if (!InUnitInterval(p)) {
        add(ViolationKind::kOutOfRange,
            "score for '" + label + "' is " + Describe(p) + ", outside [0,1]");
        binary = false;
        continue;
      }
      sum += p;
      if (p == 1.0) {
        ++ones;
      } else if (p != 0.0) {
        binary = false;
      }
    }
    if (mode == ScoreMode::kPixelProbability) {
      if (std::fabs(sum - 1.0) > kNormalizationTolerance) {
        add(ViolationKind::kNotNormalized,
            "foreign scores sum to " + Describe(sum) + ", expected 1");
      }
    } else if (!binary || ones != 1) {
      add(ViolationKind::kNotOneHot, "foreign scores are not one-hot");
    }
  }
  return report;
}

}  // namespace labelrel
