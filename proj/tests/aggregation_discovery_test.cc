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

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "labelrel/aggregation.h"
#include "labelrel/discovery.h"
#include "labelrel/io.h"
#include "test_util.h"

namespace labelrel {
namespace {

using testing::Directional;
using testing::Labeled;
using testing::Matrix;
using testing::Space;

InstanceScoreRecord Rec(std::string id, std::string label, double self,
                        std::map<std::string, double> scores) {
  return {std::move(id), "B", std::move(label), self, std::move(scores)};
}

// ------------------------------------------------------------- aggregation

TEST(AggregateTest, SingleEasyInstance) {
  const LabelSpace a = Space("A", {"a"});
  const LabelSpace b = Space("B", {"b"});
  const std::vector<InstanceScoreRecord> r = {Rec("i1", "b", 0.9, {{"a", 1.0}})};
  const auto s = AggregateDirectional(r, a, b, AggregationRequest{});
  EXPECT_EQ(s.At("a", "b"), 1.0);
  EXPECT_EQ(s.Support("b"), 1u);
}

TEST(AggregateTest, MeanOfEasyInstancesOnly) {
  const LabelSpace a = Space("A", {"a"});
  const LabelSpace b = Space("B", {"b", "c"});
  const std::vector<InstanceScoreRecord> r = {
      Rec("i1", "b", 0.9, {{"a", 0.2}}), Rec("i2", "b", 0.8, {{"a", 0.6}}),
      Rec("i3", "b", 0.5, {{"a", 1.0}}),  // not easy: 0.5 is not > 0.5
      Rec("i4", "b", 0.1, {{"a", 1.0}})};
  const auto s = AggregateDirectional(r, a, b, AggregationRequest{});
  EXPECT_NEAR(s.At("a", "b"), (0.2 + 0.6) / 2, 1e-15);
  EXPECT_EQ(s.Support("b"), 2u);
  EXPECT_EQ(s.At("a", "c"), 0.0);
  EXPECT_EQ(s.zero_support, std::vector<std::string>{"c"});

  AggregationRequest all;
  all.easy_filter = false;
  EXPECT_NEAR(AggregateDirectional(r, a, b, all).At("a", "b"), (0.2 + 0.6 + 1 + 1) / 4,
              1e-15);
}

TEST(AggregateTest, EmbeddingModeEasyMeansSelfScoreOne) {
  AggregationRequest req;
  req.mode = ScoreMode::kEmbedding1nn;
  EXPECT_TRUE(IsEasy(Rec("i", "b", 1.0, {}), req));
  EXPECT_FALSE(IsEasy(Rec("i", "b", 0.99, {}), req));
}

TEST(AggregateTest, Errors) {
  const LabelSpace a = Space("A", {"a"});
  const LabelSpace b = Space("B", {"b"});
  EXPECT_THROW(AggregateDirectional({}, a, b, AggregationRequest{}), InvalidArgument);
  std::vector<InstanceScoreRecord> r = {Rec("i1", "zzz", 1.0, {{"a", 1.0}})};
  EXPECT_THROW(AggregateDirectional(r, a, b, AggregationRequest{}), InvalidArgument);
  r = {Rec("i1", "b", 1.0, {{"a", 1.0}}), Rec("i2", "b", 1.0, {{"a", 1.0}})};
  r[1].source_dataset = "C";
  EXPECT_THROW(AggregateDirectional(r, a, b, AggregationRequest{}), InvalidArgument);
}

// Per-column sums are order independent once records are sorted by id.
TEST(AggregateTest, ParallelAndPermutationInvariant) {
  Rng rng(3);
  const LabelSpace a = Space("A", testing::Names("a", 6));
  const LabelSpace b = Space("B", testing::Names("b", 9));
  std::vector<InstanceScoreRecord> r;
  for (int i = 0; i < 500; ++i) {
    std::map<std::string, double> scores;
    for (const std::string& l : a.labels()) scores[l] = rng.Uniform() / 6;
    r.push_back(Rec("i" + std::to_string(i), b.label(rng.Index(b.size())), rng.Uniform(),
                    scores));
  }
  const auto base = AggregateDirectional(r, a, b, AggregationRequest{}, 1);
  std::reverse(r.begin(), r.end());
  for (int p : {2, 4, 16}) {
    EXPECT_EQ(AggregateDirectional(r, a, b, AggregationRequest{}, p), base);
  }
  // Mean oracle.
  for (const std::string& lb : b.labels()) {
    for (const std::string& la : a.labels()) {
      double sum = 0;
      int n = 0;
      for (const auto& x : r) {
        if (x.true_label == lb && x.self_score > 0.5) {
          sum += x.foreign_scores.at(la);
          ++n;
        }
      }
      EXPECT_NEAR(base.At(la, lb), n ? sum / n : 0.0, 1e-12);
    }
  }
}

TEST(NnClassifyTest, ExactMatchAndHandDistances) {
  const LabelSpace a = Space("A", {"a1", "a2"});
  const std::vector<EmbeddingRecord> refs = {{"r1", "a1", {0, 1}, ""},
                                             {"r2", "a2", {1, 0}, ""}};
  std::vector<EmbeddingRecord> q = {{"q1", "b", {0, 1}, "B"}, {"q2", "b", {0.1, 0.9}, "B"}};
  const auto out = NnClassify(q, refs, a);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& rec : out) {
    EXPECT_EQ(rec.foreign_scores.at("a1"), 1.0);
    EXPECT_EQ(rec.foreign_scores.at("a2"), 0.0);
  }
}

TEST(NnClassifyTest, TieGoesToSmallestReferenceId) {
  const LabelSpace a = Space("A", {"x", "y"});
  const std::vector<EmbeddingRecord> refs = {{"i2", "y", {1, 0}, ""},
                                             {"i1", "x", {0, 1}, ""}};
  const std::vector<EmbeddingRecord> q = {{"q", "b", {1, 1}, "B"}};
  EXPECT_EQ(NnClassify(q, refs, a)[0].foreign_scores.at("x"), 1.0);
}

TEST(PixelPoolingTest, MaxAndMean) {
  const std::vector<std::vector<double>> single = {{0.3, 0.7}};
  EXPECT_EQ(MaxOverPixels(single), single[0]);
  EXPECT_EQ(MeanOverPixels(single), single[0]);
  const std::vector<std::vector<double>> two = {{0.1, 0.9}, {0.8, 0.2}};
  EXPECT_EQ(MaxOverPixels(two), (std::vector<double>{0.8, 0.9}));
  const std::vector<std::vector<double>> zeros = {{0, 0}, {0, 0}};
  EXPECT_EQ(MaxOverPixels(zeros), (std::vector<double>{0, 0}));
  const std::vector<std::vector<double>> m = {{0.2, 0.8}, {0.6, 0.4}};
  const auto mean = MeanOverPixels(m);
  EXPECT_NEAR(mean[0], 0.4, 1e-15);
  EXPECT_NEAR(mean[1], 0.6, 1e-15);
  const std::vector<std::vector<double>> constant = {{0.25, 0.75}, {0.25, 0.75}};
  EXPECT_EQ(MeanOverPixels(constant), constant[0]);
  EXPECT_THROW(MaxOverPixels({}), InvalidArgument);
  const std::vector<std::vector<double>> ragged = {{0.1}, {0.1, 0.2}};
  EXPECT_THROW(MeanOverPixels(ragged), InvalidArgument);
}

// --------------------------------------------------------------- discovery

TEST(LinkScoresTest, Examples) {
  const LabelSpace a = Space("A", {"a"});
  const LabelSpace b = Space("B", {"b"});
  auto r = [&](double ab, double ba) {
    return LinkScores(Directional(a, b, Matrix({{ab}})), Directional(b, a, Matrix({{ba}})))
        .At("a", "b");
  };
  EXPECT_EQ(r(0, 0), 0.0);
  EXPECT_EQ(r(1, 1), 1.0);
  EXPECT_NEAR(r(0.6, 0.2), 0.4, 1e-15);
}

TEST(LinkScoresTest, SwapIsTransposeProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t na = 1 + rng.Index(5), nb = 1 + rng.Index(5);
    const LabelSpace a = Space("A", testing::Names("a", na));
    const LabelSpace b = Space("B", testing::Names("b", nb));
    DenseMatrix ab(na, nb), ba(nb, na);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        ab(i, j) = rng.Uniform();
        ba(j, i) = rng.Uniform();
      }
    const auto s_ab = Directional(a, b, ab), s_ba = Directional(b, a, ba);
    EXPECT_EQ(LinkScores(s_ab, s_ba), LinkScores(s_ba, s_ab).Transposed());
  }
}

TEST(LinkScoresTest, MismatchedSpacesRejected) {
  const LabelSpace a = Space("A", {"a"});
  const LabelSpace b = Space("B", {"b"});
  EXPECT_THROW(
      LinkScores(Directional(a, b, Matrix({{1}})), Directional(a, b, Matrix({{1}}))),
      InvalidArgument);
}

TEST(BinarizeTest, Examples) {
  const LabelSpace a = Space("A", {"a1", "a2"});
  const LabelSpace b = Space("B", {"b1", "b2"});
  const LabeledMatrix r = Labeled(a, b, Matrix({{0.4, 1.0}, {0.0, 0.25}}));
  EXPECT_TRUE(Binarize(r, 1.0).empty());
  const RelationGraph g = Binarize(r, 0.25);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.FindEdge("a1", "b1")->strength, 0.4);
  EXPECT_FALSE(g.FindEdge("a1", "b1")->type.has_value());
  EXPECT_FALSE(g.HasEdge("a2", "b2"));
  EXPECT_EQ(Binarize(r, -1).size(), 4u);
  EXPECT_EQ(Binarize(r, 0).size(), 3u);
}

TEST(BinarizeTest, MonotoneInThreshold) {
  Rng rng(12);
  const LabelSpace a = Space("A", testing::Names("a", 6));
  const LabelSpace b = Space("B", testing::Names("b", 6));
  DenseMatrix m(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) m(i, j) = rng.Uniform();
  const LabeledMatrix r = Labeled(a, b, m);
  RelationGraph prev = Binarize(r, -1);
  for (double t = 0; t <= 1.0; t += 0.05) {
    const RelationGraph next = Binarize(r, t);
    for (const auto& [pair, edge] : next.edges()) EXPECT_TRUE(prev.HasEdge(pair.a, pair.b));
    prev = next;
  }
}

TEST(RankPairsTest, Examples) {
  const LabelSpace a = Space("A", {"x"});
  const LabelSpace b = Space("B", {"p", "q", "r"});
  auto ranked = RankPairs(Labeled(a, b, Matrix({{0.9, 0.1, 0.5}})));
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].strength, 0.9);
  EXPECT_EQ(ranked[1].strength, 0.5);
  EXPECT_EQ(ranked[2].strength, 0.1);

  const LabelSpace a2 = Space("A", {"z", "y"});
  const LabelSpace b2 = Space("B", {"q", "p"});
  ranked = RankPairs(Labeled(a2, b2, Matrix({{1, 1}, {1, 1}})));
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& p : ranked) order.emplace_back(p.a, p.b);
  EXPECT_EQ(order, (std::vector<std::pair<std::string, std::string>>{
                       {"y", "p"}, {"y", "q"}, {"z", "p"}, {"z", "q"}}));

  ranked = RankPairs(Labeled(a, Space("B", {"p"}), Matrix({{0.3}})));
  EXPECT_EQ(ranked.size(), 1u);
}

}  // namespace
}  // namespace labelrel
