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

#include "labelrel/discovery.h"

#include <algorithm>
#include <cmath>

namespace labelrel {

LabeledMatrix LinkScores(const DirectionalScoreMatrix& s_ab,
                         const DirectionalScoreMatrix& s_ba) {
  if (!(s_ab.from_space == s_ba.to_space) || !(s_ab.to_space == s_ba.from_space)) {
    throw InvalidArgument("directional matrices " + s_ab.from_space.dataset_id() +
                          "->" + s_ab.to_space.dataset_id() + " and " +
                          s_ba.from_space.dataset_id() + "->" +
                          s_ba.to_space.dataset_id() +
                          " do not cover the same label spaces in opposite directions");
  }
  const std::size_t rows = s_ab.from_space.size();
  const std::size_t cols = s_ab.to_space.size();
  if (s_ab.values.rows() != rows || s_ab.values.cols() != cols ||
      s_ba.values.rows() != cols || s_ba.values.cols() != rows) {
    throw InvalidArgument("directional matrix shape does not match its label spaces");
  }
  LabeledMatrix r{s_ab.from_space, s_ab.to_space, DenseMatrix(rows, cols)};
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      r.values(a, b) = (s_ab.values(a, b) + s_ba.values(b, a)) / 2.0;
    }
  }
  return r;
}

RelationGraph Binarize(const LabeledMatrix& link_scores, double threshold) {
  RelationGraph graph(link_scores.row_space.dataset_id(),
                      link_scores.col_space.dataset_id());
  for (std::size_t a = 0; a < link_scores.values.rows(); ++a) {
    for (std::size_t b = 0; b < link_scores.values.cols(); ++b) {
      const double r = link_scores.values(a, b);
      if (r > threshold) {
        RelationEdge edge;
        // Edge strengths are non-negative; only cosine similarities go below 0.
        edge.strength = std::max(r, 0.0);
        graph.AddEdge(link_scores.row_space.label(a), link_scores.col_space.label(b),
                      edge);
      }
    }
  }
  return graph;
}

std::vector<ScoredPair> RankPairs(const LabeledMatrix& link_scores) {
  std::vector<ScoredPair> pairs;
  pairs.reserve(link_scores.values.rows() * link_scores.values.cols());
  for (std::size_t a = 0; a < link_scores.values.rows(); ++a) {
    for (std::size_t b = 0; b < link_scores.values.cols(); ++b) {
      pairs.push_back({link_scores.row_space.label(a), link_scores.col_space.label(b),
                       link_scores.values(a, b)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const ScoredPair& x, const ScoredPair& y) {
    if (x.strength != y.strength) return x.strength > y.strength;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  return pairs;
}

}  // namespace labelrel
