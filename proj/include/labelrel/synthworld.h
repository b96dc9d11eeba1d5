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

// Synthetic label spaces over a latent set of concepts. Each label owns a set
// of concepts (disjoint within a dataset), which fixes the true relation of
// every cross-dataset pair and lets the pipeline be checked end to end.

#ifndef LABELREL_SYNTHWORLD_H_
#define LABELREL_SYNTHWORLD_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

using ConceptSet = std::set<int>;

struct SyntheticSpace {
  std::string dataset;
  // Labels in order with the concepts they own.
  std::vector<std::pair<std::string, ConceptSet>> labels;

  LabelSpace ToLabelSpace() const;
};

struct LatentWorld {
  int num_concepts = 0;
  SyntheticSpace space_a;
  SyntheticSpace space_b;
  double noise_sigma = 0.0;
  int instances_per_concept = 1;
  std::uint64_t seed = 0;

  // Throws InvalidArgument on empty or overlapping concept sets within a
  // space, out-of-range concepts, negative sigma or non-positive counts.
  void Validate() const;
};

// Relation of label a (concepts ca) to label b (concepts cb).
RelationType ConceptRelation(const ConceptSet& ca, const ConceptSet& cb);

// Every related pair (type != none) with strength 1.
RelationGraph TrueRelations(const LatentWorld& world);

struct SyntheticInstances {
  // Instances of B scored by the model of A: input of S_{a->b}.
  std::vector<InstanceScoreRecord> b_under_a;
  // Instances of A scored by the model of B: input of S_{b->a}.
  std::vector<InstanceScoreRecord> a_under_b;
};

// For every concept and every label owning it, instances_per_concept
// instances. Foreign scores are one-hot at the foreign label owning the
// concept (background when none), plus N(0, sigma) noise per entry, clipped
// to [0, 1] and renormalized. Self scores are produced the same way in the
// instance's own space. Deterministic given the seed.
SyntheticInstances GenerateInstances(const LatentWorld& world);

// Random disjoint concept partitions for two spaces with the given label
// counts. Some concepts may stay unowned (background) in either space.
LatentWorld RandomWorld(int num_concepts, int labels_a, int labels_b, double sigma,
                        int per_concept, std::uint64_t seed);

std::string SerializeWorld(const LatentWorld& world);
LatentWorld ParseWorld(std::string_view text, std::string_view source);

}  // namespace labelrel

#endif  // LABELREL_SYNTHWORLD_H_
