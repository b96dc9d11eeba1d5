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

// Ground-truth relations from relabel counts against an intermediate label
// space, and their composition into direct relations between two datasets.

#ifndef LABELREL_GROUND_TRUTH_H_
#define LABELREL_GROUND_TRUTH_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

struct RelabelRecord {
  std::string instance_id;
  std::string original_label;
  // Pixels of the instance carrying each intermediate label after relabeling.
  std::map<std::string, long long> pixel_counts;
  long long total_pixels = 0;
};

struct CandidatePair {
  std::string original_label;
  std::string intermediate_label;
  std::size_t count = 0;

  bool operator==(const CandidatePair&) const = default;
};

// An instance supports (original, m) iff pixel_counts[m] > total_pixels / 2.
// Returns pairs with a positive count, ordered by (original, intermediate).
// Throws InvalidArgument on negative counts, non-positive totals or counts
// summing to more than the total.
std::vector<CandidatePair> DeriveCandidates(std::span<const RelabelRecord> records);

enum class OverrideAction { kRemove, kSetType };

struct Override {
  std::string original_label;
  std::string intermediate_label;
  OverrideAction action = OverrideAction::kRemove;
  // For kSetType.
  RelationType type = RelationType::kNone;
  std::string justification;
};

// Types the candidate graph with the set-theory rules, then applies the
// manual overrides. Edge strength and count are the candidate count. Throws
// InvalidArgument when an override names a pair that is not a candidate.
RelationGraph ApplyOverrides(std::span<const CandidatePair> candidates,
                             std::span<const Override> overrides,
                             const std::string& original_space,
                             const std::string& intermediate_space);

// A cross-dataset pair whose type cannot be read off the composition table.
struct ReviewItem {
  std::string a;
  std::string b;
  // Intermediate labels linking a and b with the two leg types (a to m, and
  // b to m) through each of them.
  struct Leg {
    std::string intermediate;
    RelationType a_to_m;
    RelationType b_to_m;
  };
  std::vector<Leg> legs;
};

struct Composition {
  RelationGraph relations;
  std::vector<ReviewItem> needs_review;
};

// Composes one chain step a -> m -> b. `a_to_m` is the type of a relative to
// m and `m_to_b` the type of m relative to b. Returns empty when the table
// does not determine the result.
std::optional<RelationType> ComposeStep(RelationType a_to_m, RelationType m_to_b);

// Composes typed relations A<->M and B<->M (each expressed as the type of the
// dataset label relative to the intermediate label) into A<->B relations. A
// pair reached through several intermediate labels gets a type only if every
// path agrees; otherwise it goes to review. Typed pairs and review items are
// disjoint and together cover every pair sharing an intermediate label.
Composition Compose(const RelationGraph& a_to_m, const RelationGraph& b_to_m);

std::vector<RelabelRecord> ReadRelabels(const std::filesystem::path& path);
// {"overrides": [{"a": str, "m": str, "action": "remove" | "set_type",
//                 "type": str, "justification": str}]} or a bare array.
std::vector<Override> ReadOverrides(const std::filesystem::path& path);
std::string SerializeReview(std::span<const ReviewItem> items);

}  // namespace labelrel

#endif  // LABELREL_GROUND_TRUTH_H_
