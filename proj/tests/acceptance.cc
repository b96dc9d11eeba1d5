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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "cli.h"
#include "designed_world.h"
#include "labelrel/aggregation.h"
#include "labelrel/discovery.h"
#include "labelrel/evaluation.h"
#include "labelrel/ground_truth.h"
#include "labelrel/io.h"
#include "labelrel/synthworld.h"
#include "labelrel/taxonomy.h"
#include "labelrel/type_inference.h"
#include "test_util.h"

namespace labelrel {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

// ------------------------------------------------------------- set theory

// Direct evaluation of the typing predicates on a 3x3 adjacency bitmask; bit
// 3*i+j set means (a_i, b_j) is an edge.
struct Expected {
  RelationType type;
  bool relaxed;
};

Expected OracleType(unsigned mask, int i, int j) {
  auto edge = [mask](int x, int y) { return (mask >> (3 * x + y)) & 1u; };
  auto deg_a = [&](int x) { return edge(x, 0) + edge(x, 1) + edge(x, 2); };
  auto deg_b = [&](int y) { return edge(0, y) + edge(1, y) + edge(2, y); };
  const bool a_other = deg_a(i) > 1;
  const bool b_other = deg_b(j) > 1;
  if (!a_other && !b_other) return {RelationType::kIdentity, false};
  // a_i related to at least two labels of B that have no other neighbour in A,
  // b_j being one of them.
  int exclusive_of_a = 0;
  for (int y = 0; y < 3; ++y) exclusive_of_a += edge(i, y) && deg_b(y) == 1;
  if (deg_b(j) == 1 && exclusive_of_a >= 2) return {RelationType::kParent, false};
  int exclusive_of_b = 0;
  for (int x = 0; x < 3; ++x) exclusive_of_b += edge(x, j) && deg_a(x) == 1;
  if (deg_a(i) == 1 && exclusive_of_b >= 2) return {RelationType::kChild, false};
  if (a_other && b_other) return {RelationType::kOverlap, false};
  return {a_other ? RelationType::kParent : RelationType::kChild, true};
}

Outcome SetTheoryOracle() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t edges_checked = 0;
  for (unsigned mask = 0; mask < 512; ++mask) {
    RelationGraph g("A", "B");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if ((mask >> (3 * i + j)) & 1u)
          g.AddEdge("a" + std::to_string(i), "b" + std::to_string(j), testing::Edge(1.0));
    const RelationGraph typed = SetTheoryTypes(g);
    o.Require(typed.size() == g.size(), "edge count changed");
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (!((mask >> (3 * i + j)) & 1u)) continue;
        const RelationEdge* e =
            typed.FindEdge("a" + std::to_string(i), "b" + std::to_string(j));
        const Expected want = OracleType(mask, i, j);
        ++edges_checked;
        o.Require(e && e->type == want.type && e->relaxed == want.relaxed,
                  "mismatch on edge set " + std::to_string(mask));
      }
    }
  }
  const double t = Seconds(start);
  o.Require(t < 1.0, "runtime " + Fmt("%.3f s", t));
  if (o.pass) {
    o.detail = "512 edge sets, " + std::to_string(edges_checked) + " edges, " +
               Fmt("%.3f s", t);
  }
  return o;
}

// ------------------------------------------------------- synthetic world

struct PipelineRun {
  DirectionalScoreMatrix s_ab, s_ba;
  LabeledMatrix r;
};

PipelineRun RunDesigned(const LatentWorld& w) {
  const SyntheticInstances inst = GenerateInstances(w);
  const LabelSpace a = w.space_a.ToLabelSpace(), b = w.space_b.ToLabelSpace();
  PipelineRun p;
  p.s_ab = AggregateDirectional(inst.b_under_a, a, b, AggregationRequest{});
  p.s_ba = AggregateDirectional(inst.a_under_b, b, a, AggregationRequest{});
  p.r = LinkScores(p.s_ab, p.s_ba);
  return p;
}

bool SatisfiesCardinality(const LatentWorld& w, const LabelPair& pair) {
  std::size_t ca = 0, cb = 0;
  for (const auto& [l, c] : w.space_a.labels) if (l == pair.a) ca = c.size();
  for (const auto& [l, c] : w.space_b.labels) if (l == pair.b) cb = c.size();
  const std::size_t big = std::max(ca, cb), small = std::min(ca, cb);
  return 2 * small < big;
}

Outcome SyntheticEndToEnd() {
  Outcome o;
  const auto start = Clock::now();
  const LatentWorld w = testing::DesignedWorld(0.05, 50);
  const RelationGraph truth = TrueRelations(w);

  std::set<RelationType> covered = {RelationType::kNone};
  for (const auto& [p, e] : truth.edges()) covered.insert(*e.type);
  o.Require(covered.size() == 5, "world does not cover all five predictable types");

  const PipelineRun run = RunDesigned(w);
  std::set<LabelPair> positives;
  for (const auto& [p, e] : truth.edges()) positives.insert(p);
  const PrCurve pr = ComputePrCurve(RankPairs(run.r), positives);
  o.Require(pr.average_precision >= 0.95, "AP " + Fmt("%.4f", pr.average_precision));

  const RelationGraph discovered = Binarize(run.r, 0.25);
  const RelationGraph typed = AsymmetryTypes(discovered, run.s_ab, run.s_ba, 2.0);
  std::size_t directed = 0, correct = 0;
  for (const auto& [p, e] : truth.edges()) {
    if (e.type != RelationType::kParent && e.type != RelationType::kChild) continue;
    if (!SatisfiesCardinality(w, p)) continue;
    ++directed;
    const RelationEdge* got = typed.FindEdge(p.a, p.b);
    correct += got != nullptr && got->type == e.type;
  }
  o.Require(directed > 0 && correct == directed,
            "direction accuracy " + std::to_string(correct) + "/" + std::to_string(directed));

  const PipelineRun again = RunDesigned(w);
  o.Require(again.r == run.r && again.s_ab == run.s_ab, "not deterministic under fixed seed");

  const double t = Seconds(start);
  o.Require(t < 5.0, "runtime " + Fmt("%.3f s", t));
  if (o.pass) {
    o.detail = "AP " + Fmt("%.4f", pr.average_precision) + ", direction " +
               std::to_string(correct) + "/" + std::to_string(directed) + ", " +
               Fmt("%.3f s", t);
  }
  return o;
}

// ------------------------------------------------------------------ mirror

Outcome MirrorProperty() {
  Outcome o;
  Rng rng(101);
  std::size_t edges = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t na = 1 + rng.Index(5), nb = 1 + rng.Index(5);
    const LabelSpace a("A", testing::Names("a", na)), b("B", testing::Names("b", nb));
    DenseMatrix ab(na, nb), ba(nb, na);
    RelationGraph g("A", "B");
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        ab(i, j) = 0.01 + rng.Uniform();
        ba(j, i) = 0.01 + rng.Uniform();
        if (rng.Uniform() < 0.4) g.AddEdge(a.label(i), b.label(j), testing::Edge(0.5));
      }
    }
    const auto s_ab = testing::Directional(a, b, ab), s_ba = testing::Directional(b, a, ba);

    const RelationGraph set_typed = SetTheoryTypes(g);
    const RelationGraph set_swapped = SetTheoryTypes(g.Mirrored());
    const RelationGraph asym = AsymmetryTypes(g, s_ab, s_ba, 2.0);
    const RelationGraph asym_swapped = AsymmetryTypes(g.Mirrored(), s_ba, s_ab, 2.0);
    for (const auto& typed : {&set_typed, &asym}) {
      const RelationGraph& swapped = typed == &set_typed ? set_swapped : asym_swapped;
      for (const auto& [p, e] : typed->edges()) {
        ++edges;
        const RelationEdge* m = swapped.FindEdge(p.b, p.a);
        RelationType want = *e.type;
        if (want == RelationType::kParent) want = RelationType::kChild;
        else if (want == RelationType::kChild) want = RelationType::kParent;
        o.Require(m != nullptr && m->type == want,
                  "trial " + std::to_string(trial) + " edge (" + p.a + "," + p.b + ")");
      }
      o.Require(swapped.size() == typed->size(), "edge count differs after swap");
    }
  }
  if (o.pass) o.detail = "100 graphs, " + std::to_string(edges) + " typed edges";
  return o;
}

// --------------------------------------------------------- path similarity

Outcome PathSimilarityBruteForce() {
  Outcome o;
  Rng rng(202);
  std::size_t pairs = 0;
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.Index(19);  // 2..20 nodes
    std::vector<std::string> synsets = testing::Names("s", n);
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    // Edges go from lower to higher index: acyclic by construction.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.Uniform() < 2.0 / static_cast<double>(n)) {
          edges.emplace_back(synsets[i], synsets[j]);
          d[i][j] = d[j][i] = 1;
        }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    std::map<std::string, std::string> label_map;
    for (const std::string& s : synsets) {
      label_map["A/" + s] = s;
      label_map["B/" + s] = s;
    }
    const TaxonomyGraph tax(synsets, edges, label_map);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        ++pairs;
        const double want = d[i][j] >= kInf ? 0.0 : 1.0 / (1.0 + d[i][j]);
        const double got = PathSimilarity(tax, {"A", synsets[i]}, {"B", synsets[j]});
        o.Require(got == want, "trial " + std::to_string(trial) + " pair " + synsets[i] +
                                   "," + synsets[j]);
        if (i == j) {
          o.Require(TaxonomyStrength(tax, {"A", synsets[i]}, {"B", synsets[j]}) == 2.0,
                    "identity strength is not 2.0");
        }
      }
    }
  }
  if (o.pass) o.detail = "50 DAGs, " + std::to_string(pairs) + " pairs exact";
  return o;
}

// ------------------------------------------------------ average precision

// AP of a strictly ordered ranking straight from the definition: mean over
// positives of the precision at that positive's rank.
double BruteForceAp(const std::vector<bool>& labels) {
  double sum = 0;
  int positives = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!labels[k]) continue;
    int hits = 0;
    for (std::size_t i = 0; i <= k; ++i) hits += labels[i];
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    ++positives;
  }
  return sum / positives;
}

Outcome AveragePrecisionBruteForce() {
  Outcome o;
  std::size_t rankings = 0;
  double worst = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<ScoredPair> ranked;
      std::vector<bool> labels;
      std::set<LabelPair> positives;
      for (std::size_t k = 0; k < n; ++k) {
        ranked.push_back({"a" + std::to_string(k), "b", 1.0 - static_cast<double>(k) / 16});
        labels.push_back((mask >> k) & 1u);
        if (labels.back()) positives.insert({ranked.back().a, "b"});
      }
      const double got = ComputePrCurve(ranked, positives).average_precision;
      worst = std::max(worst, std::abs(got - BruteForceAp(labels)));
      ++rankings;
    }
  }
  o.Require(worst <= 1e-9, "max deviation " + Fmt("%.3g", worst));
  const std::vector<ScoredPair> example = {{"p", "b", 0.9}, {"q", "b", 0.5}, {"r", "b", 0.1}};
  const double ap = ComputePrCurve(example, {{"p", "b"}, {"r", "b"}}).average_precision;
  o.Require(std::abs(ap - 5.0 / 6.0) <= 1e-9, "[+,-,+] gave " + Fmt("%.12f", ap));
  if (o.pass) {
    o.detail = std::to_string(rankings) + " rankings, max deviation " +
               Fmt("%.3g", worst) + ", [+,-,+] = " + Fmt("%.10f", ap);
  }
  return o;
}

// ----------------------------------------------------------- ground truth

Outcome GroundTruthRules() {
  Outcome o;
  for (long long total : {1000LL, 1001LL, 2LL}) {
    const long long half = total / 2;
    const std::vector<RelabelRecord> at_half = {{"i", "x", {{"m", half}}, total}};
    const std::vector<RelabelRecord> above = {{"i", "x", {{"m", half + 1}}, total}};
    if (2 * half == total) {
      o.Require(DeriveCandidates(at_half).empty(), "50.0% included");
    }
    o.Require(DeriveCandidates(above).size() == 1,
              "50%+1 pixel excluded at total " + std::to_string(total));
  }
  using T = RelationType;
  auto compose = [](T a_to_m, T b_to_m) -> std::optional<T> {
    RelationGraph am("A", "M"), bm("B", "M");
    am.AddEdge("a", "m", testing::Edge(1, a_to_m));
    bm.AddEdge("b", "m", testing::Edge(1, b_to_m));
    const Composition c = Compose(am, bm);
    if (!c.needs_review.empty()) return std::nullopt;
    return c.relations.FindEdge("a", "b")->type;
  };
  o.Require(compose(T::kIdentity, T::kIdentity) == T::kIdentity, "identity o identity");
  // a identical to m, b a parent of m: a is a child of b.
  o.Require(compose(T::kIdentity, T::kParent) == T::kChild, "identity o child");
  o.Require(compose(T::kChild, T::kIdentity) == T::kChild, "child o identity");
  o.Require(compose(T::kChild, T::kParent) == T::kChild, "child o child");
  o.Require(compose(T::kPartOf, T::kIdentity) == T::kPartOf, "part_of leg (A side)");
  o.Require(compose(T::kIdentity, T::kPartOf) == T::kPartOf, "part_of leg (B side)");
  o.Require(compose(T::kOverlap, T::kIdentity) == std::nullopt, "overlap leg not reviewed");
  o.Require(compose(T::kIdentity, T::kOverlap) == std::nullopt, "overlap leg not reviewed");
  if (o.pass) o.detail = "boundary at 50.0% / 50.0%+1 px, 8 composition cases";
  return o;
}

// ------------------------------------------------------ combined algebra

Outcome CombinedAlgebra() {
  Outcome o;
  Rng rng(303);
  const LabelSpace a("A", testing::Names("a", 40)), b("B", testing::Names("b", 25));
  DenseMatrix ab(40, 25), ba(25, 40), r(40, 25);
  RelationGraph g("A", "B");
  TypedPairSet tax;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 25; ++j) {
      // Mix in exact ratios on the threshold boundaries.
      const double u = 0.01 + rng.Uniform();
      const std::uint64_t pick = rng.Index(4);
      ab(i, j) = u;
      ba(j, i) = pick == 0 ? u / 2 : pick == 1 ? u * 2 : 0.01 + rng.Uniform();
      r(i, j) = rng.Uniform();
      if (edges < 1000) {
        g.AddEdge(a.label(i), b.label(j), testing::Edge(r(i, j)));
        tax[{a.label(i), b.label(j)}] = kAllRelationTypes[rng.Index(kNumRelationTypes)];
        ++edges;
      }
    }
  }
  const auto s_ab = testing::Directional(a, b, ab), s_ba = testing::Directional(b, a, ba);
  o.Require(edges == 1000, "expected 1000 edges");
  for (double T : {1.5, 2.0, 3.0}) {
    o.Require(CombineTypes(g, s_ab, s_ba, T, tax, 1.0) == AsymmetryTypes(g, s_ab, s_ba, T),
              "m=1 differs from asymmetry at T=" + Fmt("%g", T));
  }
  const LabeledMatrix link{a, b, r};
  const LabeledMatrix boosted = CombineStrengths(link, tax, 1.0);
  o.Require(std::memcmp(boosted.values.data().data(), link.values.data().data(),
                        sizeof(double) * link.values.data().size()) == 0,
            "n=1 changed R");
  if (o.pass) o.detail = "1000 edges at T in {1.5,2,3}; R bit-identical at n=1";
  return o;
}

// ------------------------------------------------------------ determinism

int Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome CliDeterminism() {
  Outcome o;
  testing::TempDir dir;
  WriteTextFile(dir / "world_in.json", SerializeWorld(testing::DesignedWorld(0.05)));
  o.Require(Cli({"synth", "--world", dir / "world_in.json", "--out-dir", dir / "w"}) == 0,
            "synth failed");
  std::vector<std::string> products;
  for (const char* p : {"1", "4", "16"}) {
    const std::string out = dir / (std::string("p") + p);
    const std::string w = dir / "w";
    o.Require(Cli({"discover", "--labels-a", w + "/labelspace_a.json", "--labels-b",
                   w + "/labelspace_b.json", "--scores-ab", w + "/scores_ab.jsonl",
                   "--scores-ba", w + "/scores_ba.jsonl", "--out-dir", out,
                   "--parallelism", p}) == 0,
              "discover failed");
    o.Require(Cli({"classify-types", "--relations", out + "/relations.jsonl", "--method",
                   "asymmetry", "--matrix-ab", out + "/matrix_ab.json", "--matrix-ba",
                   out + "/matrix_ba.json", "--out-dir", out, "--parallelism", p}) == 0,
              "classify-types failed");
    o.Require(Cli({"eval-pr", "--link-scores", out + "/link_scores.json", "--gt",
                   w + "/true_relations.jsonl", "--out-dir", out, "--parallelism", p}) == 0,
              "eval-pr failed");
    if (!o.pass) return o;
    std::string all;
    for (const char* f : {"matrix_ab.json", "matrix_ba.json", "link_scores.json",
                          "relations.jsonl", "typed_relations.jsonl", "pr.csv",
                          "pr_summary.json"}) {
      all += ReadTextFile(out + "/" + f);
    }
    products.push_back(std::move(all));
  }
  o.Require(products[0] == products[1] && products[0] == products[2],
            "outputs differ across --parallelism");
  if (o.pass) o.detail = "7 output files byte-identical at parallelism 1, 4, 16";
  return o;
}

}  // namespace
}  // namespace labelrel

int main() {
  using labelrel::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"set-theory oracle (512 graphs, < 1 s)", labelrel::SetTheoryOracle},
      {"synthetic end-to-end (AP >= 0.95, direction 100%, < 5 s)",
       labelrel::SyntheticEndToEnd},
      {"mirror property (100 graphs)", labelrel::MirrorProperty},
      {"path similarity brute force (50 DAGs) and identity strength 2.0",
       labelrel::PathSimilarityBruteForce},
      {"average precision brute force (<= 8 pairs) and [+,-,+]",
       labelrel::AveragePrecisionBruteForce},
      {"ground-truth >50% boundary and composition table", labelrel::GroundTruthRules},
      {"combined-method algebra (m=1, n=1)", labelrel::CombinedAlgebra},
      {"CLI determinism across --parallelism {1,4,16}", labelrel::CliDeterminism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "]\n";
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size()
            << " acceptance criteria passed\n";
  return failures == 0 ? 0 : 1;
}
