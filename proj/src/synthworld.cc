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

#include "labelrel/synthworld.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "labelrel/random.h"

namespace labelrel {
namespace {

void ValidateSpace(const SyntheticSpace& space, int num_concepts) {
  std::set<int> used;
  std::vector<std::string> names;
  for (const auto& [label, concepts] : space.labels) {
    if (concepts.empty()) {
      throw InvalidArgument("label '" + label + "' owns no concept");
    }
    for (int c : concepts) {
      if (c < 0 || c >= num_concepts) {
        throw InvalidArgument("label '" + label + "' owns out-of-range concept " +
                              std::to_string(c));
      }
      if (!used.insert(c).second) {
        throw InvalidArgument("concept " + std::to_string(c) +
                              " is owned by two labels of '" + space.dataset + "'");
      }
    }
    names.push_back(label);
  }
  LabelSpace(space.dataset, names);  // name checks
}

// Index of the label owning each concept, or -1.
std::vector<int> Owners(const SyntheticSpace& space, int num_concepts) {
  std::vector<int> owner(static_cast<std::size_t>(num_concepts), -1);
  for (std::size_t i = 0; i < space.labels.size(); ++i) {
    for (int c : space.labels[i].second) owner[static_cast<std::size_t>(c)] = static_cast<int>(i);
  }
  return owner;
}

// Noisy one-hot distribution over `size` entries (the last is background).
std::vector<double> NoisyOneHot(std::size_t size, std::size_t hot, double sigma,
                                Rng& rng) {
  std::vector<double> v(size, 0.0);
  v[hot] = 1.0;
  if (sigma <= 0.0) return v;
  double sum = 0.0;
  for (double& x : v) {
    x = std::clamp(x + sigma * rng.Normal(), 0.0, 1.0);
    sum += x;
  }
  if (sum <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    v[hot] = 1.0;
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

std::string InstanceId(const std::string& dataset, const std::string& label,
                       int concept_id, int k) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "/c%04d/i%05d", concept_id, k);
  return dataset + "/" + label + buffer;
}

// Instances of `own` scored under `foreign`.
void Generate(const LatentWorld& world, const SyntheticSpace& own,
              const SyntheticSpace& foreign, Rng& rng,
              std::vector<InstanceScoreRecord>& out) {
  const std::vector<int> own_owner = Owners(own, world.num_concepts);
  const std::vector<int> foreign_owner = Owners(foreign, world.num_concepts);
  const std::size_t foreign_size = foreign.labels.size() + 1;
  const std::size_t own_size = own.labels.size() + 1;
  for (int c = 0; c < world.num_concepts; ++c) {
    const int owner = own_owner[static_cast<std::size_t>(c)];
    if (owner < 0) continue;
    const std::string& label = own.labels[static_cast<std::size_t>(owner)].first;
    const int f = foreign_owner[static_cast<std::size_t>(c)];
    const std::size_t foreign_hot =
        f < 0 ? foreign.labels.size() : static_cast<std::size_t>(f);
    for (int k = 0; k < world.instances_per_concept; ++k) {
      const std::vector<double> scores =
          NoisyOneHot(foreign_size, foreign_hot, world.noise_sigma, rng);
      const std::vector<double> self = NoisyOneHot(
          own_size, static_cast<std::size_t>(owner), world.noise_sigma, rng);
      InstanceScoreRecord record;
      record.instance_id = InstanceId(own.dataset, label, c, k);
      record.source_dataset = own.dataset;
      record.true_label = label;
      record.self_score = self[static_cast<std::size_t>(owner)];
      for (std::size_t i = 0; i < foreign.labels.size(); ++i) {
        record.foreign_scores[foreign.labels[i].first] = scores[i];
      }
      record.foreign_scores[std::string(kBackgroundLabel)] = scores.back();
      out.push_back(std::move(record));
    }
  }
}

SyntheticSpace RandomSpace(const std::string& dataset, const std::string& prefix,
                           int num_concepts, int num_labels, Rng& rng) {
  std::vector<int> concepts(static_cast<std::size_t>(num_concepts));
  for (int i = 0; i < num_concepts; ++i) concepts[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = concepts.size(); i > 1; --i) {
    std::swap(concepts[i - 1], concepts[rng.Index(i)]);
  }
  // Leave up to a quarter of the spare concepts unowned.
  const int spare = num_concepts - num_labels;
  const int unowned = spare > 0 ? static_cast<int>(rng.Index(
                                      static_cast<std::uint64_t>(spare / 4 + 1)))
                                : 0;
  const int owned = num_concepts - unowned;
  // num_labels - 1 distinct cut points in [1, owned).
  std::vector<int> cuts(static_cast<std::size_t>(owned - 1));
  for (int i = 0; i < owned - 1; ++i) cuts[static_cast<std::size_t>(i)] = i + 1;
  for (std::size_t i = cuts.size(); i > 1; --i) {
    std::swap(cuts[i - 1], cuts[rng.Index(i)]);
  }
  cuts.resize(static_cast<std::size_t>(num_labels - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(owned);

  SyntheticSpace space{dataset, {}};
  int begin = 0;
  for (int i = 0; i < num_labels; ++i) {
    ConceptSet set;
    for (int j = begin; j < cuts[static_cast<std::size_t>(i)]; ++j) {
      set.insert(concepts[static_cast<std::size_t>(j)]);
    }
    begin = cuts[static_cast<std::size_t>(i)];
    space.labels.emplace_back(prefix + std::to_string(i), std::move(set));
  }
  return space;
}

}  // namespace

LabelSpace SyntheticSpace::ToLabelSpace() const {
  std::vector<std::string> names;
  for (const auto& [label, concepts] : labels) names.push_back(label);
  return LabelSpace(dataset, std::move(names));
}

void LatentWorld::Validate() const {
  if (num_concepts <= 0) throw InvalidArgument("world needs at least one concept");
  if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise sigma must be finite and >= 0");
  }
  if (instances_per_concept <= 0) {
    throw InvalidArgument("instances per concept must be positive");
  }
  if (space_a.dataset == space_b.dataset) {
    throw InvalidArgument("the two spaces need distinct dataset ids");
  }
  ValidateSpace(space_a, num_concepts);
  ValidateSpace(space_b, num_concepts);
}

RelationType ConceptRelation(const ConceptSet& ca, const ConceptSet& cb) {
  std::size_t shared = 0;
  for (int c : ca) shared += cb.count(c);
  if (shared == 0) return RelationType::kNone;
  if (shared == ca.size() && shared == cb.size()) return RelationType::kIdentity;
  if (shared == cb.size()) return RelationType::kParent;
  if (shared == ca.size()) return RelationType::kChild;
  return RelationType::kOverlap;
}

RelationGraph TrueRelations(const LatentWorld& world) {
  world.Validate();
  RelationGraph graph(world.space_a.dataset, world.space_b.dataset);
  for (const auto& [a, ca] : world.space_a.labels) {
    for (const auto& [b, cb] : world.space_b.labels) {
      const RelationType type = ConceptRelation(ca, cb);
      if (type == RelationType::kNone) continue;
      RelationEdge edge;
      edge.strength = 1.0;
      edge.type = type;
      graph.AddEdge(a, b, edge);
    }
  }
  return graph;
}

SyntheticInstances GenerateInstances(const LatentWorld& world) {
  world.Validate();
  Rng rng(world.seed);
  SyntheticInstances out;
  Generate(world, world.space_b, world.space_a, rng, out.b_under_a);
  Generate(world, world.space_a, world.space_b, rng, out.a_under_b);
  return out;
}

LatentWorld RandomWorld(int num_concepts, int labels_a, int labels_b, double sigma,
                        int per_concept, std::uint64_t seed) {
  if (labels_a < 1 || labels_b < 1 || labels_a > num_concepts ||
      labels_b > num_concepts) {
    throw InvalidArgument("each space needs between 1 and " +
                          std::to_string(num_concepts) + " labels");
  }
  // Structure and instances draw from different streams of the same seed.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  LatentWorld world;
  world.num_concepts = num_concepts;
  world.space_a = RandomSpace("A", "a", num_concepts, labels_a, rng);
  world.space_b = RandomSpace("B", "b", num_concepts, labels_b, rng);
  world.noise_sigma = sigma;
  world.instances_per_concept = per_concept;
  world.seed = seed;
  world.Validate();
  return world;
}

std::string SerializeWorld(const LatentWorld& world) {
  using nlohmann::json;
  auto space_json = [](const SyntheticSpace& space) {
    json labels = json::array();
    for (const auto& [label, concepts] : space.labels) {
      labels.push_back({{"label", label}, {"concepts", concepts}});
    }
    return json{{"dataset", space.dataset}, {"labels", std::move(labels)}};
  };
  json doc = {{"num_concepts", world.num_concepts},
              {"space_a", space_json(world.space_a)},
              {"space_b", space_json(world.space_b)},
              {"noise_sigma", world.noise_sigma},
              {"instances_per_concept", world.instances_per_concept},
              {"seed", world.seed}};
  return doc.dump(2) + "\n";
}

LatentWorld ParseWorld(std::string_view text, std::string_view source) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    auto parse_space = [](const json& j) {
      SyntheticSpace space{j.at("dataset").get<std::string>(), {}};
      for (const json& label : j.at("labels")) {
        space.labels.emplace_back(label.at("label").get<std::string>(),
                                  label.at("concepts").get<ConceptSet>());
      }
      return space;
    };
    LatentWorld world;
    world.num_concepts = doc.at("num_concepts").get<int>();
    world.space_a = parse_space(doc.at("space_a"));
    world.space_b = parse_space(doc.at("space_b"));
    world.noise_sigma = doc.at("noise_sigma").get<double>();
    world.instances_per_concept = doc.at("instances_per_concept").get<int>();
    world.seed = doc.at("seed").get<std::uint64_t>();
    world.Validate();
    return world;
  } catch (const json::exception& e) {
    throw IoError(std::string(source) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string(source) + ": " + e.what());
  }
}

}  // namespace labelrel
