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

#include "labelrel/type_inference.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>

#include "labelrel/discovery.h"
#include "labelrel/evaluation.h"

namespace labelrel {
namespace {

// Neighbour lists of both sides of a bipartite graph.
struct Adjacency {
  std::map<std::string, std::vector<std::string>> of_a;
  std::map<std::string, std::vector<std::string>> of_b;

  explicit Adjacency(const RelationGraph& graph) {
    for (const auto& [pair, edge] : graph.edges()) {
      of_a[pair.a].push_back(pair.b);
      of_b[pair.b].push_back(pair.a);
    }
  }
  std::size_t DegreeA(const std::string& a) const { return of_a.at(a).size(); }
  std::size_t DegreeB(const std::string& b) const { return of_b.at(b).size(); }
};

// `hub` has another neighbour, besides `leaf`, whose only edge is to `hub`.
bool HasOtherExclusiveNeighbour(
    const std::vector<std::string>& hub_neighbours, const std::string& leaf,
    const std::map<std::string, std::vector<std::string>>& neighbour_adjacency) {
  for (const std::string& other : hub_neighbours) {
    if (other != leaf && neighbour_adjacency.at(other).size() == 1) return true;
  }
  return false;
}

double ParseNumber(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(value)) {
    throw InvalidArgument("'" + s + "' is not a finite number");
  }
  return value;
}

double RoundTo12Digits(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return std::strtod(buffer, nullptr);
}

}  // namespace

RelationGraph SetTheoryTypes(const RelationGraph& graph) {
  const Adjacency adj(graph);
  RelationGraph out = graph;
  for (const auto& [pair, edge] : graph.edges()) {
    const std::size_t deg_a = adj.DegreeA(pair.a);
    const std::size_t deg_b = adj.DegreeB(pair.b);
    RelationEdge typed = edge;
    typed.relaxed = false;
    if (deg_a == 1 && deg_b == 1) {
      typed.type = RelationType::kIdentity;
    } else if (deg_b == 1 &&
               HasOtherExclusiveNeighbour(adj.of_a.at(pair.a), pair.b, adj.of_b)) {
      typed.type = RelationType::kParent;
    } else if (deg_a == 1 &&
               HasOtherExclusiveNeighbour(adj.of_b.at(pair.b), pair.a, adj.of_a)) {
      typed.type = RelationType::kChild;
    } else if (deg_a >= 2 && deg_b >= 2) {
      typed.type = RelationType::kOverlap;
    } else {
      // Exactly one endpoint has degree >= 2; it is taken as the broader label.
      typed.type = deg_a >= 2 ? RelationType::kParent : RelationType::kChild;
      typed.relaxed = true;
    }
    out.SetEdge(pair, typed);
  }
  return out;
}

RelationType AsymmetryType(double s_ab, double s_ba, double T) {
  if (s_ab == 0.0 && s_ba == 0.0) {
    throw InvalidArgument("both directional scores are 0; the edge has no support");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double forward = s_ba == 0.0 ? kInf : s_ab / s_ba;
  const double backward = s_ab == 0.0 ? kInf : s_ba / s_ab;
  if (forward > T) return RelationType::kParent;
  if (backward > T) return RelationType::kChild;
  return RelationType::kIdentity;
}

RelationGraph AsymmetryTypes(const RelationGraph& graph,
                             const DirectionalScoreMatrix& s_ab,
                             const DirectionalScoreMatrix& s_ba, double T) {
  if (!(T > 1.0)) throw InvalidArgument("asymmetry threshold T must be > 1");
  RelationGraph out = graph;
  for (const auto& [pair, edge] : graph.edges()) {
    RelationEdge typed = edge;
    typed.relaxed = false;
    typed.type = AsymmetryType(s_ab.At(pair.a, pair.b), s_ba.At(pair.b, pair.a), T);
    out.SetEdge(pair, typed);
  }
  return out;
}

bool IsRelatedType(RelationType type) {
  return type == RelationType::kIdentity || type == RelationType::kParent ||
         type == RelationType::kChild || type == RelationType::kOverlap;
}

LabeledMatrix CombineStrengths(const LabeledMatrix& link_scores,
                               const TypedPairSet& taxonomy, double n) {
  if (!(n >= 1.0)) throw InvalidArgument("boost factor n must be >= 1");
  LabeledMatrix out = link_scores;
  for (const auto& [pair, type] : taxonomy) {
    if (!IsRelatedType(type)) continue;
    auto a = out.row_space.IndexOf(pair.a);
    auto b = out.col_space.IndexOf(pair.b);
    if (a && b) out.values(*a, *b) *= n;
  }
  return out;
}

double EffectiveThreshold(double T, std::optional<RelationType> taxonomy_type,
                          double m) {
  if (!taxonomy_type) return T;
  switch (*taxonomy_type) {
    case RelationType::kIdentity:
      return T * m;
    case RelationType::kParent:
    case RelationType::kChild:
      return T / m;
    default:
      return T;
  }
}

RelationGraph CombineTypes(const RelationGraph& graph,
                           const DirectionalScoreMatrix& s_ab,
                           const DirectionalScoreMatrix& s_ba, double T,
                           const TypedPairSet& taxonomy, double m) {
  if (!(T > 1.0)) throw InvalidArgument("asymmetry threshold T must be > 1");
  if (!(m >= 1.0)) throw InvalidArgument("threshold factor m must be >= 1");
  RelationGraph out = graph;
  for (const auto& [pair, edge] : graph.edges()) {
    std::optional<RelationType> hint;
    if (auto it = taxonomy.find(pair); it != taxonomy.end()) hint = it->second;
    RelationEdge typed = edge;
    typed.relaxed = false;
    typed.type = AsymmetryType(s_ab.At(pair.a, pair.b), s_ba.At(pair.b, pair.a),
                               EffectiveThreshold(T, hint, m));
    out.SetEdge(pair, typed);
  }
  return out;
}

std::string_view ToString(TypingMethod method) {
  switch (method) {
    case TypingMethod::kSetTheory:
      return "set-theory";
    case TypingMethod::kAsymmetry:
      return "asymmetry";
    case TypingMethod::kCombined:
      return "combined";
  }
  return "set-theory";
}

TypingMethod ParseTypingMethod(std::string_view name) {
  if (name == "set-theory" || name == "set_theory") return TypingMethod::kSetTheory;
  if (name == "asymmetry") return TypingMethod::kAsymmetry;
  if (name == "combined") return TypingMethod::kCombined;
  throw InvalidArgument("unknown typing method '" + std::string(name) + "'");
}

std::string_view ToString(CalibrationParameter parameter) {
  return parameter == CalibrationParameter::kRelationThreshold ? "relation_threshold"
                                                               : "asymmetry_T";
}

CalibrationParameter ParseCalibrationParameter(std::string_view name) {
  if (name == "relation_threshold" || name == "threshold") {
    return CalibrationParameter::kRelationThreshold;
  }
  if (name == "asymmetry_T" || name == "T") return CalibrationParameter::kAsymmetryT;
  throw InvalidArgument("unknown calibration parameter '" + std::string(name) + "'");
}

RelationGraph PredictRelations(const TypingInputs& inputs) {
  RelationGraph graph = Binarize(inputs.link_scores, inputs.relation_threshold);
  if (inputs.method == TypingMethod::kSetTheory) return SetTheoryTypes(graph);
  if (!inputs.s_ab || !inputs.s_ba) {
    throw InvalidArgument(std::string(ToString(inputs.method)) +
                          " typing needs both directional score matrices");
  }
  if (inputs.method == TypingMethod::kAsymmetry) {
    return AsymmetryTypes(graph, *inputs.s_ab, *inputs.s_ba, inputs.asymmetry_T);
  }
  return CombineTypes(graph, *inputs.s_ab, *inputs.s_ba, inputs.asymmetry_T,
                      inputs.taxonomy, inputs.taxonomy_T_factor_m);
}

CalibrationResult Calibrate(std::span<const double> candidates,
                            CalibrationParameter parameter,
                            const TypingInputs& inputs,
                            const TypedPairSet& reference) {
  if (candidates.empty()) throw InvalidArgument("no calibration candidates");
  CalibrationResult result;
  bool have_best = false;
  for (double value : candidates) {
    TypingInputs trial = inputs;
    if (parameter == CalibrationParameter::kRelationThreshold) {
      trial.relation_threshold = value;
    } else {
      trial.asymmetry_T = value;
    }
    const TypedPairSet predicted = PredictRelations(trial).TypedPairs();
    const auto observations = PairTypes(inputs.link_scores.row_space,
                                        inputs.link_scores.col_space, predicted,
                                        reference);
    const double accuracy = ComputeTypeAccuracy(observations).macro;
    result.table.emplace_back(value, accuracy);
    if (!have_best || accuracy > result.accuracy ||
        (accuracy == result.accuracy && value < result.best_value)) {
      result.best_value = value;
      result.accuracy = accuracy;
      have_best = true;
    }
  }
  return result;
}

std::vector<double> ParseGrid(std::string_view text) {
  std::vector<double> values;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t colon = text.find(':', start);
      parts.push_back(ParseNumber(text.substr(start, colon - start)));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) {
      throw InvalidArgument("grid '" + std::string(text) + "' is not start:stop:step");
    }
    const double first = parts[0], last = parts[1], step = parts[2];
    if (!(step > 0.0) || last < first) {
      throw InvalidArgument("grid '" + std::string(text) +
                            "' needs step > 0 and stop >= start");
    }
    // Multiply instead of accumulating so values do not drift.
    const double slack = step * 1e-9;
    for (std::size_t i = 0;; ++i) {
      const double v = first + static_cast<double>(i) * step;
      if (v > last + slack) break;
      values.push_back(RoundTo12Digits(v));
    }
  } else {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      values.push_back(ParseNumber(text.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return values;
}

}  // namespace labelrel
