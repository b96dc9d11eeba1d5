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

#include <cmath>

#include "gtest/gtest.h"
#include "labelrel/discovery.h"
#include "labelrel/type_inference.h"
#include "test_util.h"

namespace labelrel {
namespace {

using testing::Directional;
using testing::Graph;
using testing::Labeled;
using testing::Matrix;
using testing::Space;

RelationType TypeOf(const RelationGraph& g, const char* a, const char* b) {
  return *g.FindEdge(a, b)->type;
}

TEST(SetTheoryTest, IsolatedEdgeIsIdentity) {
  const RelationGraph g = SetTheoryTypes(Graph({{"a1", "b1"}}));
  EXPECT_EQ(TypeOf(g, "a1", "b1"), RelationType::kIdentity);
  EXPECT_FALSE(g.FindEdge("a1", "b1")->relaxed);
}

TEST(SetTheoryTest, AnimalIsParentOfCatAndDog) {
  const RelationGraph g = SetTheoryTypes(Graph({{"animal", "cat"}, {"animal", "dog"}}));
  EXPECT_EQ(TypeOf(g, "animal", "cat"), RelationType::kParent);
  EXPECT_EQ(TypeOf(g, "animal", "dog"), RelationType::kParent);
}

TEST(SetTheoryTest, ReverseStarIsChild) {
  const RelationGraph g = SetTheoryTypes(Graph({{"cat", "animal"}, {"dog", "animal"}}));
  EXPECT_EQ(TypeOf(g, "cat", "animal"), RelationType::kChild);
  EXPECT_EQ(TypeOf(g, "dog", "animal"), RelationType::kChild);
}

TEST(SetTheoryTest, CompleteBipartiteIsOverlap) {
  const RelationGraph g =
      SetTheoryTypes(Graph({{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}}));
  for (const auto& [pair, edge] : g.edges()) {
    EXPECT_EQ(edge.type, RelationType::kOverlap);
  }
}

TEST(SetTheoryTest, RelaxedFallbackIsFlagged) {
  // a1-b1, a1-b2, a2-b2: b1 is a1's only exclusive neighbour, so (a1,b1) has no
  // strict rule; a1 has degree 2 and becomes the parent.
  const RelationGraph g = SetTheoryTypes(Graph({{"a1", "b1"}, {"a1", "b2"}, {"a2", "b2"}}));
  EXPECT_EQ(TypeOf(g, "a1", "b1"), RelationType::kParent);
  EXPECT_TRUE(g.FindEdge("a1", "b1")->relaxed);
  EXPECT_EQ(TypeOf(g, "a1", "b2"), RelationType::kOverlap);
  EXPECT_EQ(TypeOf(g, "a2", "b2"), RelationType::kChild);
  EXPECT_TRUE(g.FindEdge("a2", "b2")->relaxed);
}

TEST(SetTheoryTest, StarsProperty) {
  for (int k = 2; k <= 6; ++k) {
    RelationGraph g("A", "B");
    for (int i = 0; i < k; ++i) g.AddEdge("hub", "leaf" + std::to_string(i), {});
    const RelationGraph typed = SetTheoryTypes(g);
    for (const auto& [pair, edge] : typed.edges()) {
      EXPECT_EQ(edge.type, RelationType::kParent);
    }
  }
}

TEST(AsymmetryTest, Examples) {
  EXPECT_EQ(AsymmetryType(0.5, 0.5, 2), RelationType::kIdentity);
  EXPECT_EQ(AsymmetryType(0.9, 0.3, 2), RelationType::kParent);
  EXPECT_EQ(AsymmetryType(0.3, 0.9, 2), RelationType::kChild);
  EXPECT_EQ(AsymmetryType(0.4, 0.0, 2), RelationType::kParent);
  EXPECT_EQ(AsymmetryType(0.0, 0.4, 2), RelationType::kChild);
  EXPECT_EQ(AsymmetryType(0.4, 0.2, 2), RelationType::kIdentity);  // ratio == T
  EXPECT_THROW(AsymmetryType(0.0, 0.0, 2), InvalidArgument);
}

TEST(AsymmetryTest, RejectsTNotAboveOne) {
  const LabelSpace a = Space("A", {"a1"});
  const LabelSpace b = Space("B", {"b1"});
  EXPECT_THROW(AsymmetryTypes(Graph({{"a1", "b1"}}), Directional(a, b, Matrix({{1}})),
                              Directional(b, a, Matrix({{1}})), 1.0),
               InvalidArgument);
}

struct RandomInstance {
  LabelSpace a, b;
  DirectionalScoreMatrix s_ab, s_ba;
  RelationGraph graph;
};

RandomInstance MakeRandom(Rng& rng, std::size_t na, std::size_t nb) {
  RandomInstance x;
  x.a = Space("A", testing::Names("a", na));
  x.b = Space("B", testing::Names("b", nb));
  DenseMatrix ab(na, nb), ba(nb, na);
  x.graph = RelationGraph("A", "B");
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      ab(i, j) = 0.01 + rng.Uniform();
      ba(j, i) = 0.01 + rng.Uniform();
      if (rng.Uniform() < 0.5) x.graph.AddEdge(x.a.label(i), x.b.label(j), {});
    }
  }
  x.s_ab = Directional(x.a, x.b, ab);
  x.s_ba = Directional(x.b, x.a, ba);
  return x;
}

TEST(AsymmetryTest, MirrorAndScaleInvariance) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance x = MakeRandom(rng, 1 + rng.Index(4), 1 + rng.Index(4));
    const RelationGraph typed = AsymmetryTypes(x.graph, x.s_ab, x.s_ba, 2.0);
    const RelationGraph swapped = AsymmetryTypes(x.graph.Mirrored(), x.s_ba, x.s_ab, 2.0);
    EXPECT_EQ(swapped, typed.Mirrored());
    // Powers of two keep the ratios bit-exact.
    for (double c : {0.25, 0.5, 4.0}) {
      DirectionalScoreMatrix ab = x.s_ab, ba = x.s_ba;
      for (std::size_t i = 0; i < ab.values.rows(); ++i)
        for (std::size_t j = 0; j < ab.values.cols(); ++j) {
          ab.values(i, j) *= c;
          ba.values(j, i) *= c;
        }
      EXPECT_EQ(AsymmetryTypes(x.graph, ab, ba, 2.0), typed);
    }
    for (const auto& [pair, edge] : typed.edges()) {
      EXPECT_NE(edge.type, RelationType::kOverlap);
    }
  }
}

TEST(CombineTest, Strengths) {
  const LabelSpace a = Space("A", {"a1", "a2"});
  const LabelSpace b = Space("B", {"b1", "b2"});
  const LabeledMatrix r = Labeled(a, b, Matrix({{0.3, 0.1}, {0.2, 0.7}}));
  EXPECT_EQ(CombineStrengths(r, {}, 2.0), r);
  const TypedPairSet tax = {{{"a1", "b1"}, RelationType::kIdentity},
                            {{"a2", "b1"}, RelationType::kNone},
                            {{"a2", "b2"}, RelationType::kPartOf}};
  const LabeledMatrix boosted = CombineStrengths(r, tax, 2.0);
  EXPECT_NEAR(boosted.At("a1", "b1"), 0.6, 1e-15);
  EXPECT_EQ(boosted.At("a2", "b1"), 0.2);
  EXPECT_EQ(boosted.At("a2", "b2"), 0.7);
  EXPECT_EQ(CombineStrengths(r, tax, 1.0), r);
  EXPECT_THROW(CombineStrengths(r, tax, 0.5), InvalidArgument);
}

TEST(CombineTest, EffectiveThreshold) {
  EXPECT_EQ(EffectiveThreshold(2, std::nullopt, 2), 2.0);
  EXPECT_EQ(EffectiveThreshold(2, RelationType::kIdentity, 2), 4.0);
  EXPECT_EQ(EffectiveThreshold(2, RelationType::kParent, 2), 1.0);
  EXPECT_EQ(EffectiveThreshold(2, RelationType::kChild, 2), 1.0);
  EXPECT_EQ(EffectiveThreshold(2, RelationType::kOverlap, 2), 2.0);
}

TEST(CombineTest, TypesExamples) {
  const LabelSpace a = Space("A", {"a"});
  const LabelSpace b = Space("B", {"b"});
  const RelationGraph g = Graph({{"a", "b"}});
  auto type = [&](double ab, double ba, const TypedPairSet& tax) {
    return TypeOf(CombineTypes(g, Directional(a, b, Matrix({{ab}})),
                               Directional(b, a, Matrix({{ba}})), 2.0, tax, 2.0),
                  "a", "b");
  };
  EXPECT_EQ(type(0.9, 0.3, {}), RelationType::kParent);
  EXPECT_EQ(type(0.9, 0.3, {{{"a", "b"}, RelationType::kIdentity}}),
            RelationType::kIdentity);
  EXPECT_EQ(type(0.6, 0.4, {}), RelationType::kIdentity);
  EXPECT_EQ(type(0.6, 0.4, {{{"a", "b"}, RelationType::kParent}}), RelationType::kParent);
}

TEST(CombineTest, MEqualsOneIsAsymmetry) {
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance x = MakeRandom(rng, 3, 3);
    TypedPairSet tax;
    for (const auto& [pair, edge] : x.graph.edges()) {
      tax[pair] = kAllRelationTypes[rng.Index(kNumRelationTypes)];
    }
    EXPECT_EQ(CombineTypes(x.graph, x.s_ab, x.s_ba, 2.0, tax, 1.0),
              AsymmetryTypes(x.graph, x.s_ab, x.s_ba, 2.0));
  }
}

TEST(CalibrateTest, PicksTheOnlyExactCandidate) {
  const LabelSpace a = Space("A", {"a1", "a2", "a3"});
  const LabelSpace b = Space("B", {"b1", "b2", "b3"});
  TypingInputs in;
  in.method = TypingMethod::kAsymmetry;
  in.link_scores = Labeled(a, b, Matrix({{0.5, 0, 0}, {0, 0.5, 0}, {0, 0, 0.5}}));
  // Ratios: 3, 1.8 and 1/3.
  in.s_ab = Directional(a, b, Matrix({{0.9, 0, 0}, {0, 0.9, 0}, {0, 0, 0.2}}));
  in.s_ba = Directional(b, a, Matrix({{0.3, 0, 0}, {0, 0.5, 0}, {0, 0, 0.6}}));
  const TypedPairSet reference = {{{"a1", "b1"}, RelationType::kParent},
                                  {{"a2", "b2"}, RelationType::kIdentity},
                                  {{"a3", "b3"}, RelationType::kChild}};
  const std::vector<double> grid = {1.5, 2.0, 4.0};
  // Oracle: exhaustive evaluation of each candidate.
  int exact = 0;
  for (double t : grid) {
    bool all = AsymmetryType(0.9, 0.3, t) == RelationType::kParent &&
               AsymmetryType(0.9, 0.5, t) == RelationType::kIdentity &&
               AsymmetryType(0.2, 0.6, t) == RelationType::kChild;
    exact += all;
    EXPECT_EQ(all, t == 2.0);
  }
  EXPECT_EQ(exact, 1);
  const CalibrationResult res =
      Calibrate(grid, CalibrationParameter::kAsymmetryT, in, reference);
  EXPECT_EQ(res.best_value, 2.0);
  EXPECT_EQ(res.accuracy, 1.0);
  EXPECT_EQ(res.table.size(), 3u);

  const std::vector<double> single = {4.0};
  EXPECT_EQ(Calibrate(single, CalibrationParameter::kAsymmetryT, in, reference).best_value,
            4.0);
  // Every threshold below 0.5 keeps the same edges: tie, smallest wins.
  const std::vector<double> ties = {0.3, 0.1, 0.2};
  EXPECT_EQ(
      Calibrate(ties, CalibrationParameter::kRelationThreshold, in, reference).best_value,
      0.1);
  EXPECT_THROW(Calibrate({}, CalibrationParameter::kAsymmetryT, in, reference),
               InvalidArgument);
}

TEST(ParseGridTest, RangeAndList) {
  const auto g = ParseGrid("1.1:1.5:0.1");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 1.1);
  EXPECT_EQ(g.back(), 1.5);
  EXPECT_EQ(ParseGrid("1.5,2,4"), (std::vector<double>{1.5, 2, 4}));
  EXPECT_EQ(ParseGrid("1.1:8:0.1").size(), 70u);
  EXPECT_THROW(ParseGrid("1:2:0"), InvalidArgument);
  EXPECT_THROW(ParseGrid("x"), InvalidArgument);
}

TEST(MethodNamesTest, Parse) {
  EXPECT_EQ(ParseTypingMethod("combined"), TypingMethod::kCombined);
  EXPECT_EQ(ParseCalibrationParameter("asymmetry_T"), CalibrationParameter::kAsymmetryT);
  EXPECT_THROW(ParseTypingMethod("magic"), InvalidArgument);
}

}  // namespace
}  // namespace labelrel
