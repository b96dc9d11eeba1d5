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

#include "labelrel/applications.h"

#include <algorithm>
#include <limits>

#include "labelrel/random.h"

namespace labelrel {
namespace {

double SquaredDistance(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    d += diff * diff;
  }
  return d;
}

std::vector<std::size_t> SeedPlusPlus(std::span<const EmbeddingRecord> records,
                                      std::size_t k, Rng& rng) {
  const std::size_t n = records.size();
  std::vector<std::size_t> centers{static_cast<std::size_t>(rng.Index(n))};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  chosen[centers[0]] = 1;
  while (centers.size() < k) {
    const std::vector<double>& last = records[centers.back()].vector;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(records[i].vector, last));
      if (!chosen[i]) total += nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double target = rng.Uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || nearest[i] == 0.0) continue;
        pick = i;
        target -= nearest[i];
        if (target < 0.0) break;
      }
    } else {
      // All remaining points coincide with a center; take the first unused.
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!chosen[i]) pick = i;
      }
    }
    chosen[pick] = 1;
    centers.push_back(pick);
  }
  return centers;
}

}  // namespace

LinkStrength ComputeLinkStrength(const DirectionalScoreMatrix& s_ab,
                                 const RelationGraph& relations, std::string_view b,
                                 const std::optional<std::set<RelationType>>& types) {
  const std::size_t column = s_ab.to_space.IndexOrThrow(b);
  LinkStrength out;
  double sum = 0.0;
  for (const auto& [pair, edge] : relations.edges()) {
    if (pair.b != b) continue;
    if (types && (!edge.type || !types->contains(*edge.type))) continue;
    sum += s_ab.values(s_ab.from_space.IndexOrThrow(pair.a), column);
    ++out.related;
  }
  if (out.related == 0) {
    out.empty = true;
    return out;
  }
  out.value = sum / static_cast<double>(out.related);
  return out;
}

GainGroups GroupGains(const std::map<std::string, double>& strengths,
                      std::span<const TransferGainRecord> gains, std::size_t n) {
  if (n < 1) throw InvalidArgument("group size n must be >= 1");
  if (2 * n > strengths.size()) {
    throw InvalidArgument("2n = " + std::to_string(2 * n) + " exceeds the " +
                          std::to_string(strengths.size()) + " labels");
  }
  std::map<std::string, double> gain_of;
  for (const TransferGainRecord& g : gains) gain_of[g.target_label] = g.gain;

  std::vector<std::pair<std::string, double>> order(strengths.begin(), strengths.end());
  for (const auto& [label, strength] : order) {
    if (!gain_of.contains(label)) {
      throw InvalidArgument("no transfer gain for label '" + label + "'");
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first < y.first;
  });

  GainGroups out;
  auto mean = [&](const std::vector<std::string>& labels) {
    double sum = 0.0;
    for (const std::string& label : labels) sum += gain_of.at(label);
    return sum / static_cast<double>(labels.size());
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n) {
      out.low_labels.push_back(order[i].first);
    } else if (i >= order.size() - n) {
      out.top_labels.push_back(order[i].first);
    } else {
      out.mid_labels.push_back(order[i].first);
    }
  }
  out.low = mean(out.low_labels);
  out.top = mean(out.top_labels);
  if (!out.mid_labels.empty()) out.mid = mean(out.mid_labels);
  return out;
}

RefinementResult RefineLabels(const std::string& parent,
                              std::span<const InstanceScoreRecord> records,
                              const RelationGraph& relations,
                              const std::map<std::string, std::string>* reference) {
  RefinementResult out;
  for (const auto& [pair, edge] : relations.edges()) {
    if (pair.a == parent && edge.type == RelationType::kParent) {
      out.children.push_back(pair.b);
    }
  }
  if (out.children.empty()) {
    throw InvalidArgument("label '" + parent + "' has no child relations");
  }
  std::size_t judged = 0;
  std::size_t correct = 0;
  for (const InstanceScoreRecord& record : records) {
    if (record.true_label != parent) continue;
    const std::string* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const std::string& child : out.children) {
      auto it = record.foreign_scores.find(child);
      const double score = it == record.foreign_scores.end() ? 0.0 : it->second;
      if (score > best_score) {
        best_score = score;
        best = &child;
      }
    }
    out.labels.emplace_back(record.instance_id, *best);
    if (reference != nullptr) {
      auto it = reference->find(record.instance_id);
      if (it == reference->end()) continue;
      ++out.confusion[{it->second, *best}];
      ++judged;
      if (it->second == *best) ++correct;
    }
  }
  if (reference != nullptr && judged > 0) {
    out.top1_accuracy = static_cast<double>(correct) / static_cast<double>(judged);
  }
  return out;
}

ClusteringResult ClusterEmbeddings(std::span<const EmbeddingRecord> records,
                                   std::size_t k, std::uint64_t seed,
                                   std::size_t max_iterations) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (k > records.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(records.size()) + " records");
  }
  const std::size_t dimension = records.front().vector.size();
  for (const EmbeddingRecord& r : records) {
    if (r.vector.size() != dimension) {
      throw InvalidArgument("embedding of '" + r.instance_id +
                            "' has a different dimension");
    }
  }

  Rng rng(seed);
  std::vector<std::vector<double>> centroids;
  for (std::size_t index : SeedPlusPlus(records, k, rng)) {
    centroids.push_back(records[index].vector);
  }

  ClusteringResult out;
  out.assignment.assign(records.size(), k);
  for (std::size_t iteration = 0; iteration < max_iterations; ++iteration) {
    bool changed = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
      std::size_t best = 0;
      double best_distance = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = SquaredDistance(records[i].vector, centroids[c]);
        if (d < best_distance) {
          best_distance = d;
          best = c;
        }
      }
      if (out.assignment[i] != best) {
        out.assignment[i] = best;
        changed = true;
      }
    }
    out.iterations = iteration + 1;
    if (!changed) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dimension, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const std::size_t c = out.assignment[i];
      ++sizes[c];
      for (std::size_t d = 0; d < dimension; ++d) sums[c][d] += records[i].vector[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // keep the previous centroid
      for (std::size_t d = 0; d < dimension; ++d) {
        centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
      }
    }
  }

  std::set<std::string> datasets;
  for (const EmbeddingRecord& r : records) datasets.insert(r.source_dataset);
  out.datasets.assign(datasets.begin(), datasets.end());
  out.composition.assign(k, std::vector<std::size_t>(out.datasets.size(), 0));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto column = static_cast<std::size_t>(
        std::lower_bound(out.datasets.begin(), out.datasets.end(),
                         records[i].source_dataset) -
        out.datasets.begin());
    ++out.composition[out.assignment[i]][column];
  }
  return out;
}

}  // namespace labelrel
