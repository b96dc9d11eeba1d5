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

#include "labelrel/ground_truth.h"

#include <set>

#include "json.hpp"
#include "labelrel/io.h"
#include "labelrel/type_inference.h"

namespace labelrel {

std::vector<CandidatePair> DeriveCandidates(std::span<const RelabelRecord> records) {
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (const RelabelRecord& r : records) {
    if (r.total_pixels <= 0) {
      throw InvalidArgument("instance '" + r.instance_id +
                            "' has a non-positive pixel total");
    }
    long long sum = 0;
    for (const auto& [label, count] : r.pixel_counts) {
      if (count < 0) {
        throw InvalidArgument("instance '" + r.instance_id +
                              "' has a negative pixel count for '" + label + "'");
      }
      sum += count;
    }
    if (sum > r.total_pixels) {
      throw InvalidArgument("instance '" + r.instance_id + "' counts " +
                            std::to_string(sum) + " relabeled pixels but has only " +
                            std::to_string(r.total_pixels));
    }
    for (const auto& [label, count] : r.pixel_counts) {
      // Strictly more than half, in integers.
      if (2 * count > r.total_pixels) ++counts[{r.original_label, label}];
    }
  }
  std::vector<CandidatePair> out;
  out.reserve(counts.size());
  for (const auto& [pair, count] : counts) {
    out.push_back({pair.first, pair.second, count});
  }
  return out;
}

RelationGraph ApplyOverrides(std::span<const CandidatePair> candidates,
                             std::span<const Override> overrides,
                             const std::string& original_space,
                             const std::string& intermediate_space) {
  RelationGraph graph(original_space, intermediate_space);
  for (const CandidatePair& c : candidates) {
    RelationEdge edge;
    edge.strength = static_cast<double>(c.count);
    edge.count = c.count;
    graph.AddEdge(c.original_label, c.intermediate_label, edge);
  }
  std::set<LabelPair> removed;
  for (const Override& o : overrides) {
    const LabelPair pair{o.original_label, o.intermediate_label};
    if (!graph.HasEdge(pair.a, pair.b)) {
      throw InvalidArgument("override targets (" + pair.a + ", " + pair.b +
                            ") which is not a derived candidate");
    }
    if (o.action == OverrideAction::kRemove) removed.insert(pair);
  }
  // Removals reshape the degree structure, so typing runs after them.
  RelationGraph kept(original_space, intermediate_space);
  for (const auto& [pair, edge] : graph.edges()) {
    if (!removed.contains(pair)) kept.AddEdge(pair.a, pair.b, edge);
  }
  RelationGraph typed = SetTheoryTypes(kept);
  for (const Override& o : overrides) {
    if (o.action != OverrideAction::kSetType) continue;
    const LabelPair pair{o.original_label, o.intermediate_label};
    const RelationEdge* edge = typed.FindEdge(pair.a, pair.b);
    if (edge == nullptr) {
      throw InvalidArgument("override sets the type of removed pair (" + pair.a +
                            ", " + pair.b + ")");
    }
    RelationEdge updated = *edge;
    updated.type = o.type;
    updated.relaxed = false;
    typed.SetEdge(pair, updated);
  }
  return typed;
}

std::optional<RelationType> ComposeStep(RelationType a_to_m, RelationType m_to_b) {
  using T = RelationType;
  if (a_to_m == T::kPartOf || m_to_b == T::kPartOf) return T::kPartOf;
  if (a_to_m == T::kIdentity && m_to_b == T::kIdentity) return T::kIdentity;
  for (T directed : {T::kChild, T::kParent}) {
    const bool a_ok = a_to_m == directed || a_to_m == T::kIdentity;
    const bool b_ok = m_to_b == directed || m_to_b == T::kIdentity;
    if (a_ok && b_ok) return directed;
  }
  return std::nullopt;
}

Composition Compose(const RelationGraph& a_to_m, const RelationGraph& b_to_m) {
  // Intermediate label -> typed legs of each side.
  std::map<std::string, std::vector<std::pair<std::string, RelationType>>> a_legs;
  std::map<std::string, std::vector<std::pair<std::string, RelationType>>> b_legs;
  auto collect = [](const RelationGraph& graph, auto& legs) {
    for (const auto& [pair, edge] : graph.edges()) {
      if (!edge.type) {
        throw InvalidArgument("relation (" + pair.a + ", " + pair.b +
                              ") is untyped; composition needs typed relations");
      }
      if (*edge.type == RelationType::kNone) continue;
      legs[pair.b].emplace_back(pair.a, *edge.type);
    }
  };
  collect(a_to_m, a_legs);
  collect(b_to_m, b_legs);

  std::map<LabelPair, std::vector<ReviewItem::Leg>> paths;
  for (const auto& [m, as] : a_legs) {
    auto it = b_legs.find(m);
    if (it == b_legs.end()) continue;
    for (const auto& [a, type_a] : as) {
      for (const auto& [b, type_b] : it->second) {
        paths[LabelPair{a, b}].push_back({m, type_a, type_b});
      }
    }
  }

  Composition out{RelationGraph(a_to_m.space_a(), b_to_m.space_a()), {}};
  for (const auto& [pair, legs] : paths) {
    std::optional<RelationType> agreed;
    bool determined = true;
    for (const ReviewItem::Leg& leg : legs) {
      const auto step = ComposeStep(leg.a_to_m, Mirror(leg.b_to_m));
      if (!step || (agreed && *agreed != *step)) {
        determined = false;
        break;
      }
      agreed = step;
    }
    if (determined) {
      RelationEdge edge;
      edge.strength = 1.0;
      edge.type = agreed;
      out.relations.AddEdge(pair.a, pair.b, edge);
    } else {
      out.needs_review.push_back({pair.a, pair.b, legs});
    }
  }
  return out;
}

std::vector<RelabelRecord> ReadRelabels(const std::filesystem::path& path) {
  using nlohmann::json;
  const std::string text = ReadTextFile(path);
  std::vector<RelabelRecord> records;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      RelabelRecord r;
      r.instance_id = j.at("instance_id").get<std::string>();
      r.original_label = j.at("original_label").get<std::string>();
      r.pixel_counts = j.at("pixel_counts").get<std::map<std::string, long long>>();
      r.total_pixels = j.at("total_pixels").get<long long>();
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_number) + ": " +
                    e.what());
    }
  }
  return records;
}

std::vector<Override> ReadOverrides(const std::filesystem::path& path) {
  using nlohmann::json;
  try {
    const json doc = json::parse(ReadTextFile(path));
    const json& list = doc.is_array() ? doc : doc.at("overrides");
    std::vector<Override> out;
    for (const json& item : list) {
      Override o;
      o.original_label = item.at("a").get<std::string>();
      o.intermediate_label = item.at("m").get<std::string>();
      const std::string action = item.at("action").get<std::string>();
      if (action == "remove") {
        o.action = OverrideAction::kRemove;
      } else if (action == "set_type") {
        o.action = OverrideAction::kSetType;
        o.type = ParseRelationType(item.at("type").get<std::string>());
      } else {
        throw InvalidArgument("unknown override action '" + action + "'");
      }
      o.justification = item.value("justification", std::string());
      out.push_back(std::move(o));
    }
    return out;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string SerializeReview(std::span<const ReviewItem> items) {
  using nlohmann::json;
  std::string out;
  for (const ReviewItem& item : items) {
    json legs = json::array();
    for (const ReviewItem::Leg& leg : item.legs) {
      legs.push_back({{"m", leg.intermediate},
                      {"a_to_m", ToString(leg.a_to_m)},
                      {"b_to_m", ToString(leg.b_to_m)}});
    }
    out += json{{"a", item.a}, {"b", item.b}, {"via", std::move(legs)}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace labelrel
