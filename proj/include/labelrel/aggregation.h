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

// Directional score matrices S_{a->b} from per-instance predictions, plus the
// two ways of producing per-instance predictions: pixel score pooling and
// 1-nearest-neighbour classification of instance embeddings.

#ifndef LABELREL_AGGREGATION_H_
#define LABELREL_AGGREGATION_H_

#include <span>
#include <string>
#include <vector>

#include "labelrel/io.h"
#include "labelrel/types.h"

namespace labelrel {

struct AggregationRequest {
  ScoreMode mode = ScoreMode::kPixelProbability;
  bool easy_filter = true;
  // Pixel mode: an instance is easy iff self_score > easy_threshold.
  // Embedding mode: easy iff self_score == 1.
  double easy_threshold = 0.5;
  // Pooling of per-pixel rows into an instance vector.
  AggregationMode aggregation_mode = AggregationMode::kMean;
};

bool IsEasy(const InstanceScoreRecord& record, const AggregationRequest& req);

// Averages the foreign scores of the (easy) instances of every label of
// `instance_space` under the labels of `model_space`:
//   S[a][b] = 1/n_b * sum over easy instances i of b of foreign_scores_i[a].
// Records are accumulated in instance_id order so the result does not depend
// on record order or on `parallelism`. Throws InvalidArgument for an empty
// record list, a true label outside `instance_space`, foreign labels outside
// `model_space` or records from more than one source dataset.
DirectionalScoreMatrix AggregateDirectional(
    std::span<const InstanceScoreRecord> records, const LabelSpace& model_space,
    const LabelSpace& instance_space, const AggregationRequest& req,
    int parallelism = 1);

// Classifies each query by its nearest reference (Euclidean distance between
// L2-normalized vectors; ties go to the smallest reference instance_id). The
// result has one-hot foreign scores over `reference_space` and self_score 1.
std::vector<InstanceScoreRecord> NnClassify(std::span<const EmbeddingRecord> queries,
                                            std::span<const EmbeddingRecord> references,
                                            const LabelSpace& reference_space,
                                            int parallelism = 1);

// Leave-one-out 1-NN within one dataset: 1 when the nearest other record
// carries the same label, else 0. Keyed by instance_id, in input order.
std::vector<std::pair<std::string, double>> LeaveOneOutSelfScores(
    std::span<const EmbeddingRecord> records, int parallelism = 1);

// Column-wise maximum / mean of a pixels x labels matrix. Throw
// InvalidArgument on an empty or ragged matrix.
std::vector<double> MaxOverPixels(std::span<const std::vector<double>> pixel_scores);
std::vector<double> MeanOverPixels(std::span<const std::vector<double>> pixel_scores);

// Pools pixel rows into per-instance records. `label_order` names the columns
// (background included). Missing self scores default to 1.
std::vector<InstanceScoreRecord> PoolPixelScores(
    std::span<const PixelScoreRecord> pixels, std::span<const std::string> label_order,
    AggregationMode mode, const std::string& source_dataset);

}  // namespace labelrel

#endif  // LABELREL_AGGREGATION_H_
