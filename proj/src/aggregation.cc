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

#include "labelrel/aggregation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "labelrel/parallel.h"

namespace labelrel {
namespace {

std::vector<double> Normalized(const EmbeddingRecord& record) {
  double norm = 0.0;
  for (double v : record.vector) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("embedding of '" + record.instance_id +
                          "' has zero or non-finite norm");
  }
  std::vector<double> out(record.vector.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = record.vector[i] / norm;
  return out;
}

double SquaredDistance(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    d += diff * diff;
  }
  return d;
}

// Normalized vectors ordered by instance_id, so a strict "<" scan keeps the
// smallest id among equidistant candidates.
struct NormalizedSet {
  std::vector<const EmbeddingRecord*> records;
  std::vector<std::vector<double>> vectors;
};

NormalizedSet PrepareReferences(std::span<const EmbeddingRecord> refs) {
  NormalizedSet set;
  for (const EmbeddingRecord& r : refs) set.records.push_back(&r);
  std::stable_sort(set.records.begin(), set.records.end(),
                   [](const EmbeddingRecord* x, const EmbeddingRecord* y) {
                     return x->instance_id < y->instance_id;
                   });
  set.vectors.reserve(refs.size());
  for (const EmbeddingRecord* r : set.records) set.vectors.push_back(Normalized(*r));
  return set;
}

void CheckDimension(const EmbeddingRecord& record, std::size_t dimension) {
  if (record.vector.size() != dimension) {
    throw InvalidArgument("embedding of '" + record.instance_id + "' has dimension " +
                          std::to_string(record.vector.size()) + ", expected " +
                          std::to_string(dimension));
  }
}

template <typename Pool>
std::vector<double> PoolColumns(std::span<const std::vector<double>> rows,
                                Pool&& pool) {
  if (rows.empty() || rows.front().empty()) {
    throw InvalidArgument("pixel score matrix is empty");
  }
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != cols) throw InvalidArgument("pixel score matrix is ragged");
  }
  std::vector<double> out(cols);
  for (std::size_t c = 0; c < cols; ++c) out[c] = pool(rows, c);
  return out;
}

}  // namespace

bool IsEasy(const InstanceScoreRecord& record, const AggregationRequest& req) {
  if (!req.easy_filter) return true;
  if (req.mode == ScoreMode::kEmbedding1nn) return record.self_score == 1.0;
  return record.self_score > req.easy_threshold;
}

DirectionalScoreMatrix AggregateDirectional(
    std::span<const InstanceScoreRecord> records, const LabelSpace& model_space,
    const LabelSpace& instance_space, const AggregationRequest& req,
    int parallelism) {
  if (records.empty()) throw InvalidArgument("no instance records to aggregate");
  const std::string& source = records.front().source_dataset;
  for (const InstanceScoreRecord& r : records) {
    if (r.source_dataset != source) {
      throw InvalidArgument("records mix source datasets '" + source + "' and '" +
                            r.source_dataset + "'");
    }
    for (const auto& [label, p] : r.foreign_scores) {
      if (label != kBackgroundLabel && !model_space.Contains(label)) {
        throw InvalidArgument("record '" + r.instance_id + "' scores label '" +
                              label + "' outside label space '" +
                              model_space.dataset_id() + "'");
      }
    }
  }

  std::vector<const InstanceScoreRecord*> sorted;
  sorted.reserve(records.size());
  for (const InstanceScoreRecord& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const InstanceScoreRecord* x, const InstanceScoreRecord* y) {
                     return x->instance_id < y->instance_id;
                   });

  std::vector<std::vector<const InstanceScoreRecord*>> by_label(instance_space.size());
  for (const InstanceScoreRecord* r : sorted) {
    const std::size_t b = instance_space.IndexOrThrow(r->true_label);
    if (IsEasy(*r, req)) by_label[b].push_back(r);
  }

  DirectionalScoreMatrix out;
  out.from_space = model_space;
  out.to_space = instance_space;
  out.values = DenseMatrix(model_space.size(), instance_space.size());
  out.support.assign(instance_space.size(), 0);

  std::vector<std::vector<double>> columns(instance_space.size());
  ParallelFor(instance_space.size(), parallelism, [&](std::size_t b) {
    std::vector<double> sums(model_space.size(), 0.0);
    for (const InstanceScoreRecord* r : by_label[b]) {
      for (const auto& [label, p] : r->foreign_scores) {
        if (auto a = model_space.IndexOf(label)) sums[*a] += p;
      }
    }
    const std::size_t n = by_label[b].size();
    if (n > 0) {
      for (double& s : sums) s /= static_cast<double>(n);
    }
    columns[b] = std::move(sums);
  });

  for (std::size_t b = 0; b < instance_space.size(); ++b) {
    out.support[b] = by_label[b].size();
    if (by_label[b].empty()) out.zero_support.push_back(instance_space.label(b));
    for (std::size_t a = 0; a < model_space.size(); ++a) {
      out.values(a, b) = columns[b][a];
    }
  }
  return out;
}

std::vector<InstanceScoreRecord> NnClassify(std::span<const EmbeddingRecord> queries,
                                            std::span<const EmbeddingRecord> references,
                                            const LabelSpace& reference_space,
                                            int parallelism) {
  if (references.empty()) throw InvalidArgument("no reference embeddings");
  const std::size_t dimension = references.front().vector.size();
  for (const EmbeddingRecord& r : references) {
    CheckDimension(r, dimension);
    reference_space.IndexOrThrow(r.true_label);
  }
  for (const EmbeddingRecord& q : queries) CheckDimension(q, dimension);

  const NormalizedSet refs = PrepareReferences(references);
  std::vector<InstanceScoreRecord> out(queries.size());
  ParallelFor(queries.size(), parallelism, [&](std::size_t i) {
    const EmbeddingRecord& query = queries[i];
    const std::vector<double> q = Normalized(query);
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < refs.vectors.size(); ++j) {
      const double d = SquaredDistance(q, refs.vectors[j]);
      if (d < best_distance) {
        best_distance = d;
        best = j;
      }
    }
    InstanceScoreRecord record;
    record.instance_id = query.instance_id;
    record.source_dataset = query.source_dataset;
    record.true_label = query.true_label;
    record.self_score = 1.0;
    for (const std::string& label : reference_space.labels()) {
      record.foreign_scores[label] = 0.0;
    }
    record.foreign_scores[std::string(kBackgroundLabel)] = 0.0;
    record.foreign_scores[refs.records[best]->true_label] = 1.0;
    out[i] = std::move(record);
  });
  return out;
}

std::vector<std::pair<std::string, double>> LeaveOneOutSelfScores(
    std::span<const EmbeddingRecord> records, int parallelism) {
  std::vector<std::pair<std::string, double>> out(records.size());
  if (records.empty()) return out;
  const std::size_t dimension = records.front().vector.size();
  for (const EmbeddingRecord& r : records) CheckDimension(r, dimension);
  const NormalizedSet refs = PrepareReferences(records);
  ParallelFor(records.size(), parallelism, [&](std::size_t i) {
    const EmbeddingRecord& query = records[i];
    const std::vector<double> q = Normalized(query);
    const EmbeddingRecord* best = nullptr;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < refs.vectors.size(); ++j) {
      if (refs.records[j] == &query) continue;
      const double d = SquaredDistance(q, refs.vectors[j]);
      if (d < best_distance) {
        best_distance = d;
        best = refs.records[j];
      }
    }
    const bool correct = best != nullptr && best->true_label == query.true_label;
    out[i] = {query.instance_id, correct ? 1.0 : 0.0};
  });
  return out;
}

std::vector<double> MaxOverPixels(std::span<const std::vector<double>> pixel_scores) {
  return PoolColumns(pixel_scores, [](auto rows, std::size_t c) {
    double best = rows.front()[c];
    for (const auto& row : rows) best = std::max(best, row[c]);
    return best;
  });
}

std::vector<double> MeanOverPixels(std::span<const std::vector<double>> pixel_scores) {
  return PoolColumns(pixel_scores, [](auto rows, std::size_t c) {
    double sum = 0.0;
    for (const auto& row : rows) sum += row[c];
    return sum / static_cast<double>(rows.size());
  });
}

std::vector<InstanceScoreRecord> PoolPixelScores(
    std::span<const PixelScoreRecord> pixels, std::span<const std::string> label_order,
    AggregationMode mode, const std::string& source_dataset) {
  std::vector<InstanceScoreRecord> out;
  out.reserve(pixels.size());
  for (const PixelScoreRecord& p : pixels) {
    std::vector<double> pooled = mode == AggregationMode::kMax ? MaxOverPixels(p.rows)
                                                               : MeanOverPixels(p.rows);
    if (pooled.size() != label_order.size()) {
      throw InvalidArgument("pixel rows of '" + p.instance_id + "' have " +
                            std::to_string(pooled.size()) +
                            " columns but the label order names " +
                            std::to_string(label_order.size()));
    }
    InstanceScoreRecord record;
    record.instance_id = p.instance_id;
    record.source_dataset = source_dataset;
    record.true_label = p.true_label;
    record.self_score = p.self_score.value_or(1.0);
    for (std::size_t c = 0; c < pooled.size(); ++c) {
      record.foreign_scores[label_order[c]] = pooled[c];
    }
    out.push_back(std::move(record));
  }
  return out;
}

}  // namespace labelrel
