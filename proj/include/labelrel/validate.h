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

#ifndef LABELREL_VALIDATE_H_
#define LABELREL_VALIDATE_H_

#include <span>
#include <string>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

enum class ViolationKind {
  kUnknownTrueLabel,
  kUnknownForeignLabel,
  kOutOfRange,
  kNotNormalized,
  kNotOneHot,
  kDuplicateInstance,
};

std::string_view ToString(ViolationKind kind);

struct Violation {
  std::string instance_id;
  ViolationKind kind;
  std::string message;
};

// Tolerance on the sum of a pixel-probability score vector.
inline constexpr double kNormalizationTolerance = 1e-6;

// Checks records of instances from `instance_space` scored under the labels of
// `foreign_space`. Returns every violation found; empty means valid.
std::vector<Violation> ValidateInputs(const LabelSpace& foreign_space,
                                      const LabelSpace& instance_space,
                                      std::span<const InstanceScoreRecord> records,
                                      ScoreMode mode);

}  // namespace labelrel

#endif  // LABELREL_VALIDATE_H_
