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

#include "cli.h"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "labelrel/aggregation.h"
#include "labelrel/applications.h"
#include "labelrel/discovery.h"
#include "labelrel/evaluation.h"
#include "labelrel/ground_truth.h"
#include "labelrel/io.h"
#include "labelrel/synthworld.h"
#include "labelrel/taxonomy.h"
#include "labelrel/type_inference.h"
#include "labelrel/types.h"
#include "labelrel/validate.h"

namespace labelrel::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string Sha256Hex(const std::string& content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// State shared by every subcommand: output location and the files touched,
// which end up in the run manifest.
struct RunContext {
  std::string out_dir = ".";
  std::string manifest;
  int parallelism = 1;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::ostream* out = nullptr;

  const std::string& Input(const std::string& path) {
    inputs.push_back(path);
    return path;
  }
  // `override_path` wins over out_dir / default_name when non-empty.
  fs::path Output(const std::string& default_name,
                  const std::string& override_path = "") {
    fs::path path =
        override_path.empty() ? fs::path(out_dir) / default_name : fs::path(override_path);
    outputs.push_back(path.string());
    return path;
  }
};

using Handler = std::function<int(RunContext&)>;

void AddCommon(CLI::App* sub, RunContext& ctx) {
  sub->add_option("--out-dir", ctx.out_dir, "Directory receiving all products")
      ->capture_default_str();
  sub->add_option("--manifest", ctx.manifest, "Manifest path override");
  sub->add_option("--parallelism", ctx.parallelism, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void WriteManifest(const RunContext& ctx, const CLI::App& sub, int exit_code) {
  auto hashed = [](const std::vector<std::string>& paths) {
    json list = json::array();
    for (const std::string& path : paths) {
      json entry = {{"path", path}};
      std::error_code ec;
      if (fs::is_regular_file(path, ec)) entry["sha256"] = Sha256Hex(ReadTextFile(path));
      list.push_back(std::move(entry));
    }
    return list;
  };
  json manifest = {{"tool", "labelrel"},
                   {"version", kVersion},
                   {"subcommand", sub.get_name()},
                   {"timestamp", UtcTimestamp()},
                   {"exit_code", exit_code},
                   {"config", sub.config_to_str(true, false)},
                   {"inputs", hashed(ctx.inputs)},
                   {"outputs", hashed(ctx.outputs)}};
  const fs::path path = ctx.manifest.empty() ? fs::path(ctx.out_dir) / "manifest.json"
                                             : fs::path(ctx.manifest);
  WriteTextFile(path, manifest.dump(2) + "\n");
}

std::string CsvLine(std::initializer_list<std::string> fields) {
  std::string line;
  for (const std::string& field : fields) {
    if (!line.empty()) line += ',';
    line += field;
  }
  return line + "\n";
}

std::optional<std::set<RelationType>> ParseTypeFilter(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::set<RelationType> types;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) types.insert(ParseRelationType(item));
  }
  return types;
}

// ---------------------------------------------------------------- validate

Handler AddValidate(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string labels_a, labels_b, scores, mode = "pixel-probability";
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand("validate", "Check score records against label spaces");
  AddCommon(sub, ctx);
  sub->add_option("--labels-a", f->labels_a, "Label space of the scoring model")->required();
  sub->add_option("--labels-b", f->labels_b, "Label space of the scored instances")
      ->required();
  sub->add_option("--scores", f->scores, "scores.jsonl")->required();
  sub->add_option("--mode", f->mode, "pixel-probability | embedding-1nn")
      ->capture_default_str();
  return [f](RunContext& c) {
    const LabelSpace a = ReadLabelSpace(c.Input(f->labels_a));
    const LabelSpace b = ReadLabelSpace(c.Input(f->labels_b));
    const auto records = ReadScoreRecords(c.Input(f->scores));
    const auto violations = ValidateInputs(a, b, records, ParseScoreMode(f->mode));
    json list = json::array();
    for (const Violation& v : violations) {
      list.push_back({{"instance_id", v.instance_id},
                      {"kind", ToString(v.kind)},
                      {"message", v.message}});
    }
    json report = {{"valid", violations.empty()},
                   {"records", records.size()},
                   {"violations", std::move(list)}};
    WriteTextFile(c.Output("validation_report.json"), report.dump(2) + "\n");
    *c.out << records.size() << " records, " << violations.size() << " violations\n";
    for (const Violation& v : violations) {
      *c.out << "  " << v.instance_id << ": " << v.message << "\n";
    }
    return violations.empty() ? kExitOk : kExitValidation;
  };
}

// --------------------------------------------------------------- aggregate

struct AggregationFlags {
  std::string mode = "pixel-probability";
  bool no_easy_filter = false;
  double easy_threshold = 0.5;
  std::string aggregation = "mean";

  void Register(CLI::App* sub) {
    sub->add_option("--mode", mode, "pixel-probability | embedding-1nn")
        ->capture_default_str();
    sub->add_flag("--no-easy-filter", no_easy_filter, "Aggregate over all instances");
    sub->add_option("--easy-threshold", easy_threshold,
                    "Pixel mode: instances with self score above this are easy")
        ->capture_default_str();
    sub->add_option("--aggregation", aggregation, "Pixel pooling: mean | max")
        ->capture_default_str();
  }
  AggregationRequest Request() const {
    AggregationRequest req;
    req.mode = ParseScoreMode(mode);
    req.easy_filter = !no_easy_filter;
    req.easy_threshold = easy_threshold;
    req.aggregation_mode = ParseAggregationMode(aggregation);
    return req;
  }
};

Handler AddAggregate(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string labels_a, labels_b, scores, pixel_scores, pixel_labels, queries,
        references, self_queries, out;
    AggregationFlags agg;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "aggregate", "Directional score matrix S_{a->b} of B's instances under A's model");
  AddCommon(sub, ctx);
  sub->add_option("--labels-a", f->labels_a, "Label space of the scoring model (rows)")
      ->required();
  sub->add_option("--labels-b", f->labels_b, "Label space of the instances (columns)")
      ->required();
  sub->add_option("--scores", f->scores, "Per-instance scores.jsonl");
  sub->add_option("--pixel-scores", f->pixel_scores, "pixel_scores.jsonl");
  sub->add_option("--pixel-labels", f->pixel_labels, "Column order of the pixel rows");
  sub->add_option("--queries", f->queries, "Embeddings of B's instances");
  sub->add_option("--references", f->references, "Embeddings of A's instances");
  sub->add_option("--self-queries", f->self_queries,
                  "Embeddings of B's instances under B's own model (easy test)");
  sub->add_option("--out", f->out, "Output matrix path");
  f->agg.Register(sub);
  return [f](RunContext& c) {
    const LabelSpace a = ReadLabelSpace(c.Input(f->labels_a));
    const LabelSpace b = ReadLabelSpace(c.Input(f->labels_b));
    AggregationRequest req = f->agg.Request();
    std::vector<InstanceScoreRecord> records;
    if (!f->scores.empty()) {
      records = ReadScoreRecords(c.Input(f->scores));
    } else if (!f->pixel_scores.empty()) {
      if (f->pixel_labels.empty()) {
        throw InvalidArgument("--pixel-scores needs --pixel-labels");
      }
      const auto pixels = ReadPixelScores(c.Input(f->pixel_scores));
      const auto order = ReadLabelOrder(c.Input(f->pixel_labels));
      records = PoolPixelScores(pixels, order, req.aggregation_mode, b.dataset_id());
    } else if (!f->queries.empty() && !f->references.empty()) {
      req.mode = ScoreMode::kEmbedding1nn;
      auto queries = ReadEmbeddingRecords(c.Input(f->queries));
      for (auto& q : queries) q.source_dataset = b.dataset_id();
      const auto refs = ReadEmbeddingRecords(c.Input(f->references));
      records = NnClassify(queries, refs, a, c.parallelism);
      if (!f->self_queries.empty()) {
        const auto own = ReadEmbeddingRecords(c.Input(f->self_queries));
        std::map<std::string, double> self;
        for (auto& [id, score] : LeaveOneOutSelfScores(own, c.parallelism)) {
          self[id] = score;
        }
        for (auto& r : records) {
          auto it = self.find(r.instance_id);
          if (it == self.end()) {
            throw InvalidArgument("no self embedding for instance '" + r.instance_id +
                                  "'");
          }
          r.self_score = it->second;
        }
      }
    } else {
      throw InvalidArgument(
          "give --scores, --pixel-scores/--pixel-labels or --queries/--references");
    }
    const DirectionalScoreMatrix s = AggregateDirectional(records, a, b, req, c.parallelism);
    const std::string name = "matrix_" + a.dataset_id() + "_" + b.dataset_id() + ".json";
    WriteDirectionalMatrix(c.Output(name, f->out), s);
    if (f->scores.empty()) {
      WriteScoreRecords(c.Output("records_" + a.dataset_id() + "_" + b.dataset_id() +
                                 ".jsonl"),
                        records);
    }
    *c.out << "aggregated " << records.size() << " records into " << a.size() << "x"
           << b.size() << " matrix\n";
    for (const std::string& label : s.zero_support) {
      *c.out << "warning: no easy instance of '" << label << "'\n";
    }
    return kExitOk;
  };
}

// ---------------------------------------------------------------- discover

Handler AddDiscover(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string labels_a, labels_b, scores_ab, scores_ba, matrix_ab, matrix_ba, out;
    double threshold = 0.25;
    AggregationFlags agg;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub =
      app.add_subcommand("discover", "Link scores R and the binary relation set");
  AddCommon(sub, ctx);
  sub->add_option("--labels-a", f->labels_a, "labelspace.json of dataset A");
  sub->add_option("--labels-b", f->labels_b, "labelspace.json of dataset B");
  sub->add_option("--scores-ab", f->scores_ab, "B's instances scored by A's model");
  sub->add_option("--scores-ba", f->scores_ba, "A's instances scored by B's model");
  sub->add_option("--matrix-ab", f->matrix_ab, "Precomputed S_{a->b} matrix");
  sub->add_option("--matrix-ba", f->matrix_ba, "Precomputed S_{b->a} matrix");
  sub->add_option("--threshold", f->threshold, "Relation exists iff R > threshold")
      ->capture_default_str();
  sub->add_option("--out", f->out, "relations.jsonl path");
  f->agg.Register(sub);
  return [f](RunContext& c) {
    DirectionalScoreMatrix s_ab, s_ba;
    if (!f->matrix_ab.empty() && !f->matrix_ba.empty()) {
      s_ab = ReadDirectionalMatrix(c.Input(f->matrix_ab));
      s_ba = ReadDirectionalMatrix(c.Input(f->matrix_ba));
    } else if (!f->scores_ab.empty() && !f->scores_ba.empty() &&
               !f->labels_a.empty() && !f->labels_b.empty()) {
      const LabelSpace a = ReadLabelSpace(c.Input(f->labels_a));
      const LabelSpace b = ReadLabelSpace(c.Input(f->labels_b));
      const AggregationRequest req = f->agg.Request();
      s_ab = AggregateDirectional(ReadScoreRecords(c.Input(f->scores_ab)), a, b, req,
                                  c.parallelism);
      s_ba = AggregateDirectional(ReadScoreRecords(c.Input(f->scores_ba)), b, a, req,
                                  c.parallelism);
      WriteDirectionalMatrix(c.Output("matrix_ab.json"), s_ab);
      WriteDirectionalMatrix(c.Output("matrix_ba.json"), s_ba);
    } else {
      throw InvalidArgument(
          "give --matrix-ab/--matrix-ba or --labels-a/--labels-b/--scores-ab/--scores-ba");
    }
    const LabeledMatrix r = LinkScores(s_ab, s_ba);
    const RelationGraph graph = Binarize(r, f->threshold);
    WriteLabeledMatrix(c.Output("link_scores.json"), r);
    WriteRelations(c.Output("relations.jsonl", f->out), graph);
    *c.out << graph.size() << " relations above threshold "
           << FormatDouble(f->threshold) << "\n";
    return kExitOk;
  };
}

// ---------------------------------------------------------- classify-types

struct TypingFlags {
  std::string matrix_ab, matrix_ba, taxonomy_relations;
  double T = 2.0;
  double m = 2.0;

  void Register(CLI::App* sub) {
    sub->add_option("--matrix-ab", matrix_ab, "S_{a->b} matrix");
    sub->add_option("--matrix-ba", matrix_ba, "S_{b->a} matrix");
    sub->add_option("--T,--asymmetry-T", T, "Asymmetry ratio threshold (> 1)")
        ->capture_default_str();
    sub->add_option("--m", m, "Taxonomy factor on T (>= 1)")->capture_default_str();
    sub->add_option("--taxonomy-relations", taxonomy_relations,
                    "Typed taxonomy predictions (relations.jsonl format)");
  }
};

Handler AddClassifyTypes(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string relations, method = "set-theory", out;
    TypingFlags typing;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand("classify-types", "Assign relation types");
  AddCommon(sub, ctx);
  sub->add_option("--relations", f->relations, "Binary relations.jsonl")->required();
  sub->add_option("--method", f->method, "set-theory | asymmetry | combined")
      ->capture_default_str();
  sub->add_option("--out", f->out, "Typed relations path");
  f->typing.Register(sub);
  return [f](RunContext& c) {
    const TypingMethod method = ParseTypingMethod(f->method);
    RelationGraph typed;
    if (method == TypingMethod::kSetTheory) {
      typed = SetTheoryTypes(ReadRelations(c.Input(f->relations), "", ""));
    } else {
      if (f->typing.matrix_ab.empty() || f->typing.matrix_ba.empty()) {
        throw InvalidArgument("--method " + f->method + " needs --matrix-ab and --matrix-ba");
      }
      const auto s_ab = ReadDirectionalMatrix(c.Input(f->typing.matrix_ab));
      const auto s_ba = ReadDirectionalMatrix(c.Input(f->typing.matrix_ba));
      const RelationGraph graph =
          ReadRelations(c.Input(f->relations), s_ab.from_space.dataset_id(),
                        s_ab.to_space.dataset_id());
      if (method == TypingMethod::kAsymmetry) {
        typed = AsymmetryTypes(graph, s_ab, s_ba, f->typing.T);
      } else {
        TypedPairSet taxonomy;
        if (!f->typing.taxonomy_relations.empty()) {
          taxonomy = ReadTypedPairs(c.Input(f->typing.taxonomy_relations));
        }
        typed = CombineTypes(graph, s_ab, s_ba, f->typing.T, taxonomy, f->typing.m);
      }
    }
    WriteRelations(c.Output("typed_relations.jsonl", f->out), typed);
    std::map<std::string, int> histogram;
    for (const auto& [pair, edge] : typed.edges()) {
      ++histogram[std::string(ToString(*edge.type)) + (edge.relaxed ? " (relaxed)" : "")];
    }
    for (const auto& [name, count] : histogram) *c.out << name << ": " << count << "\n";
    return kExitOk;
  };
}

// --------------------------------------------------------- taxonomy-relate

Handler AddTaxonomyRelate(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string taxonomy, labels_a, labels_b;
    bool allow_unmapped = false;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand("taxonomy-relate",
                                     "Taxonomy relation types and path-similarity strengths");
  AddCommon(sub, ctx);
  sub->add_option("--taxonomy", f->taxonomy, "taxonomy.json")->required();
  sub->add_option("--labels-a", f->labels_a, "labelspace.json of A")->required();
  sub->add_option("--labels-b", f->labels_b, "labelspace.json of B")->required();
  sub->add_flag("--allow-unmapped", f->allow_unmapped,
                "Treat labels missing from the label map as unmapped");
  return [f](RunContext& c) {
    const auto tax = ParseTaxonomy(ReadTextFile(c.Input(f->taxonomy)), f->taxonomy,
                                   f->allow_unmapped);
    const LabelSpace a = ReadLabelSpace(c.Input(f->labels_a));
    const LabelSpace b = ReadLabelSpace(c.Input(f->labels_b));
    const TaxonomyPredictions pred = PredictWithTaxonomy(*tax, a, b, c.parallelism);
    RelationGraph graph(a.dataset_id(), b.dataset_id());
    for (const auto& [pair, type] : pred.types) {
      RelationEdge edge;
      edge.strength = pred.strengths.At(pair.a, pair.b);
      edge.type = type;
      graph.AddEdge(pair.a, pair.b, edge);
    }
    WriteLabeledMatrix(c.Output("taxonomy_strength.json"), pred.strengths);
    WriteRelations(c.Output("taxonomy_relations.jsonl"), graph);
    std::size_t related = 0;
    for (const auto& [pair, type] : pred.types) related += IsRelatedType(type);
    *c.out << related << " of " << pred.types.size() << " pairs related in the taxonomy\n";
    return kExitOk;
  };
}

// ------------------------------------------------------------ embed-relate

Handler AddEmbedRelate(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string vectors, labels_a, labels_b;
    double threshold = 0.25;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand("embed-relate",
                                     "Word-embedding cosine similarities between labels");
  AddCommon(sub, ctx);
  sub->add_option("--vectors", f->vectors, "word_vectors.tsv")->required();
  sub->add_option("--labels-a", f->labels_a, "labelspace.json of A")->required();
  sub->add_option("--labels-b", f->labels_b, "labelspace.json of B")->required();
  sub->add_option("--threshold", f->threshold, "Relation exists iff similarity > threshold")
      ->capture_default_str();
  return [f](RunContext& c) {
    const WordEmbeddingTable table =
        ParseWordVectors(ReadTextFile(c.Input(f->vectors)), f->vectors);
    const LabelSpace a = ReadLabelSpace(c.Input(f->labels_a));
    const LabelSpace b = ReadLabelSpace(c.Input(f->labels_b));
    const LabeledMatrix sim = EmbeddingSimilarities(table, a, b);
    // A symmetric similarity only supports set-theory typing.
    const RelationGraph typed = SetTheoryTypes(Binarize(sim, f->threshold));
    WriteLabeledMatrix(c.Output("embedding_similarity.json"), sim);
    WriteRelations(c.Output("relations.jsonl"), typed);
    *c.out << typed.size() << " relations above threshold "
           << FormatDouble(f->threshold) << "\n";
    return kExitOk;
  };
}

// ----------------------------------------------------------------- combine

Handler AddCombine(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string link_scores;
    double n = 2.0;
    double threshold = 0.25;
    TypingFlags typing;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand("combine", "Vision + taxonomy combination");
  AddCommon(sub, ctx);
  sub->add_option("--link-scores", f->link_scores, "Visual link scores R")->required();
  sub->add_option("--n", f->n, "Strength factor for taxonomy-related pairs (>= 1)")
      ->capture_default_str();
  sub->add_option("--threshold", f->threshold, "Relation exists iff boosted R > threshold")
      ->capture_default_str();
  f->typing.Register(sub);
  return [f](RunContext& c) {
    if (f->typing.taxonomy_relations.empty()) {
      throw InvalidArgument("combine needs --taxonomy-relations");
    }
    const LabeledMatrix r = ReadLabeledMatrix(c.Input(f->link_scores));
    const TypedPairSet taxonomy = ReadTypedPairs(c.Input(f->typing.taxonomy_relations));
    const LabeledMatrix boosted = CombineStrengths(r, taxonomy, f->n);
    WriteLabeledMatrix(c.Output("combined_link_scores.json"), boosted);
    RelationGraph graph = Binarize(boosted, f->threshold);
    if (!f->typing.matrix_ab.empty() && !f->typing.matrix_ba.empty()) {
      const auto s_ab = ReadDirectionalMatrix(c.Input(f->typing.matrix_ab));
      const auto s_ba = ReadDirectionalMatrix(c.Input(f->typing.matrix_ba));
      graph = CombineTypes(graph, s_ab, s_ba, f->typing.T, taxonomy, f->typing.m);
    }
    WriteRelations(c.Output("relations.jsonl"), graph);
    *c.out << graph.size() << " combined relations\n";
    return kExitOk;
  };
}

// --------------------------------------------------------------- calibrate

Handler AddCalibrate(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string param = "asymmetry_T", grid = "1.1:8:0.1", reference, link_scores,
                method = "asymmetry";
    double threshold = 0.25;
    TypingFlags typing;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "calibrate", "Grid search of a threshold against reference relation types");
  AddCommon(sub, ctx);
  sub->add_option("--param", f->param, "relation_threshold | asymmetry_T")
      ->capture_default_str();
  sub->add_option("--grid", f->grid, "start:stop:step or comma separated values")
      ->capture_default_str();
  sub->add_option("--reference", f->reference, "Reference types, e.g. taxonomy_relations.jsonl")
      ->required();
  sub->add_option("--link-scores", f->link_scores, "Link scores R (default: from matrices)");
  sub->add_option("--method", f->method, "set-theory | asymmetry | combined")
      ->capture_default_str();
  sub->add_option("--threshold", f->threshold, "Relation threshold when calibrating T")
      ->capture_default_str();
  f->typing.Register(sub);
  return [f](RunContext& c) {
    TypingInputs inputs;
    inputs.method = ParseTypingMethod(f->method);
    inputs.relation_threshold = f->threshold;
    inputs.asymmetry_T = f->typing.T;
    inputs.taxonomy_T_factor_m = f->typing.m;
    if (!f->typing.matrix_ab.empty() && !f->typing.matrix_ba.empty()) {
      inputs.s_ab = ReadDirectionalMatrix(c.Input(f->typing.matrix_ab));
      inputs.s_ba = ReadDirectionalMatrix(c.Input(f->typing.matrix_ba));
    }
    if (!f->link_scores.empty()) {
      inputs.link_scores = ReadLabeledMatrix(c.Input(f->link_scores));
    } else if (inputs.s_ab && inputs.s_ba) {
      inputs.link_scores = LinkScores(*inputs.s_ab, *inputs.s_ba);
    } else {
      throw InvalidArgument("give --link-scores or --matrix-ab/--matrix-ba");
    }
    if (!f->typing.taxonomy_relations.empty()) {
      inputs.taxonomy = ReadTypedPairs(c.Input(f->typing.taxonomy_relations));
    }
    TypedPairSet reference;
    for (const auto& [pair, type] : ReadTypedPairs(c.Input(f->reference))) {
      if (type != RelationType::kNone) reference.emplace(pair, type);
    }
    const CalibrationParameter parameter = ParseCalibrationParameter(f->param);
    const std::vector<double> grid = ParseGrid(f->grid);
    const CalibrationResult result = Calibrate(grid, parameter, inputs, reference);

    std::string csv = "value,macro_accuracy\n";
    json table = json::array();
    for (const auto& [value, accuracy] : result.table) {
      csv += CsvLine({FormatDouble(value), FormatDouble(accuracy)});
      table.push_back({{"value", RoundSignificant(value)},
                       {"macro_accuracy", RoundSignificant(accuracy)}});
    }
    json summary = {{"parameter", ToString(parameter)},
                    {"method", ToString(inputs.method)},
                    {"best_value", RoundSignificant(result.best_value)},
                    {"macro_accuracy", RoundSignificant(result.accuracy)},
                    {"candidates", std::move(table)}};
    WriteTextFile(c.Output("calibration.json"), summary.dump(2) + "\n");
    WriteTextFile(c.Output("calibration.csv"), csv);
    *c.out << ToString(parameter) << " = " << FormatDouble(result.best_value)
           << " (macro accuracy " << FormatDouble(result.accuracy) << ")\n";
    return kExitOk;
  };
}

// --------------------------------------------------------------- gt-derive

Handler AddGtDerive(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string relabels, overrides, dataset = "A", intermediate = "M", out;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "gt-derive", "Ground-truth relations to an intermediate label space");
  AddCommon(sub, ctx);
  sub->add_option("--relabels", f->relabels, "relabels.jsonl")->required();
  sub->add_option("--overrides", f->overrides, "overrides.json");
  sub->add_option("--dataset", f->dataset, "Id of the original label space")
      ->capture_default_str();
  sub->add_option("--intermediate", f->intermediate, "Id of the intermediate label space")
      ->capture_default_str();
  sub->add_option("--out", f->out, "Output relations path");
  return [f](RunContext& c) {
    const auto records = ReadRelabels(c.Input(f->relabels));
    std::vector<Override> overrides;
    if (!f->overrides.empty()) overrides = ReadOverrides(c.Input(f->overrides));
    const auto candidates = DeriveCandidates(records);
    const RelationGraph gt =
        ApplyOverrides(candidates, overrides, f->dataset, f->intermediate);
    WriteRelations(c.Output("gt_relations.jsonl", f->out), gt);
    *c.out << candidates.size() << " candidate pairs, " << gt.size() << " kept\n";
    return kExitOk;
  };
}

// -------------------------------------------------------------- gt-compose

Handler AddGtCompose(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string rel_am, rel_bm, dataset_a = "A", dataset_b = "B";
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "gt-compose", "Compose A<->M and B<->M relations into A<->B ground truth");
  AddCommon(sub, ctx);
  sub->add_option("--rel-am", f->rel_am, "Relations of A's labels to M's labels")
      ->required();
  sub->add_option("--rel-bm", f->rel_bm, "Relations of B's labels to M's labels")
      ->required();
  sub->add_option("--dataset-a", f->dataset_a, "Id of A")->capture_default_str();
  sub->add_option("--dataset-b", f->dataset_b, "Id of B")->capture_default_str();
  return [f](RunContext& c) {
    const RelationGraph am = ReadRelations(c.Input(f->rel_am), f->dataset_a, "M");
    const RelationGraph bm = ReadRelations(c.Input(f->rel_bm), f->dataset_b, "M");
    const Composition comp = Compose(am, bm);
    WriteRelations(c.Output("gt_relations.jsonl"), comp.relations);
    WriteTextFile(c.Output("needs_review.jsonl"), SerializeReview(comp.needs_review));
    *c.out << comp.relations.size() << " composed relations, "
           << comp.needs_review.size() << " need review\n";
    return kExitOk;
  };
}

// ----------------------------------------------------------------- eval-pr

Handler AddEvalPr(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string link_scores, gt;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub =
      app.add_subcommand("eval-pr", "Precision-recall curve and AUC of link scores");
  AddCommon(sub, ctx);
  sub->add_option("--link-scores", f->link_scores, "Predicted strengths over all pairs")
      ->required();
  sub->add_option("--gt", f->gt, "Ground-truth relations")->required();
  return [f](RunContext& c) {
    const LabeledMatrix r = ReadLabeledMatrix(c.Input(f->link_scores));
    const RelationGraph gt = ReadRelations(c.Input(f->gt), "", "");
    std::set<LabelPair> positives;
    for (const auto& [pair, edge] : gt.edges()) {
      if (edge.type != RelationType::kNone) positives.insert(pair);
    }
    const std::vector<ScoredPair> ranked = RankPairs(r);
    const PrCurve curve = ComputePrCurve(ranked, positives);
    std::string csv = "recall,precision\n";
    for (const PrPoint& p : curve.points) {
      csv += CsvLine({FormatDouble(p.recall), FormatDouble(p.precision)});
    }
    json summary = {{"auc", RoundSignificant(curve.average_precision)},
                    {"positives", curve.positives},
                    {"pairs", ranked.size()}};
    WriteTextFile(c.Output("pr.csv"), csv);
    WriteTextFile(c.Output("pr_summary.json"), summary.dump(2) + "\n");
    *c.out << "AUC " << FormatDouble(curve.average_precision) << " over "
           << ranked.size() << " pairs, " << curve.positives << " positives\n";
    return kExitOk;
  };
}

// -------------------------------------------------------------- eval-types

Handler AddEvalTypes(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string pred, gt, labels_a, labels_b;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub =
      app.add_subcommand("eval-types", "Per-type accuracy and confusion matrix");
  AddCommon(sub, ctx);
  sub->add_option("--pred", f->pred, "Predicted typed relations")->required();
  sub->add_option("--gt", f->gt, "Ground-truth typed relations")->required();
  sub->add_option("--labels-a", f->labels_a, "labelspace.json of A")->required();
  sub->add_option("--labels-b", f->labels_b, "labelspace.json of B")->required();
  return [f](RunContext& c) {
    const LabelSpace a = ReadLabelSpace(c.Input(f->labels_a));
    const LabelSpace b = ReadLabelSpace(c.Input(f->labels_b));
    const auto observations = PairTypes(a, b, ReadTypedPairs(c.Input(f->pred)),
                                        ReadTypedPairs(c.Input(f->gt)));
    const TypeAccuracy accuracy = ComputeTypeAccuracy(observations);
    const ConfusionMatrix confusion = ComputeConfusion(observations);
    std::string csv = "gt_type,pred_type,count\n";
    for (RelationType truth : kAllRelationTypes) {
      for (RelationType pred : kAllRelationTypes) {
        csv += CsvLine({std::string(ToString(truth)), std::string(ToString(pred)),
                        std::to_string(confusion[static_cast<std::size_t>(truth)]
                                                [static_cast<std::size_t>(pred)])});
      }
    }
    json per_type = json::object();
    for (const auto& [type, value] : accuracy.per_type) {
      per_type[std::string(ToString(type))] = RoundSignificant(value);
    }
    json summary = {{"macro_accuracy", RoundSignificant(accuracy.macro)},
                    {"per_type", std::move(per_type)},
                    {"pairs", observations.size()}};
    WriteTextFile(c.Output("confusion.csv"), csv);
    WriteTextFile(c.Output("type_accuracy.json"), summary.dump(2) + "\n");
    for (const auto& [type, value] : accuracy.per_type) {
      *c.out << ToString(type) << ": " << FormatDouble(value) << "\n";
    }
    *c.out << "macro accuracy " << FormatDouble(accuracy.macro) << "\n";
    return kExitOk;
  };
}

// ------------------------------------------------------- transfer-strength

Handler AddTransferStrength(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string matrix_ab, relations, gains, types;
    std::size_t n = 0;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "transfer-strength", "Per-target-label link strength and transfer-gain groups");
  AddCommon(sub, ctx);
  sub->add_option("--matrix-ab", f->matrix_ab, "S_{a->b}: source rows, target columns")
      ->required();
  sub->add_option("--relations", f->relations, "Relations between source and target")
      ->required();
  sub->add_option("--gains", f->gains, "gains.csv (label,gain)");
  sub->add_option("--n", f->n, "Size of the low and top groups");
  sub->add_option("--types", f->types, "Only count edges of these types (comma list)");
  return [f](RunContext& c) {
    const auto s_ab = ReadDirectionalMatrix(c.Input(f->matrix_ab));
    const RelationGraph relations =
        ReadRelations(c.Input(f->relations), s_ab.from_space.dataset_id(),
                      s_ab.to_space.dataset_id());
    const auto filter = ParseTypeFilter(f->types);
    std::map<std::string, double> strengths;
    std::string csv = "label,strength,related\n";
    for (const std::string& b : s_ab.to_space.labels()) {
      const LinkStrength s = ComputeLinkStrength(s_ab, relations, b, filter);
      strengths[b] = s.value;
      csv += CsvLine({b, FormatDouble(s.value), std::to_string(s.related)});
      if (s.empty) *c.out << "warning: no source label related to '" << b << "'\n";
    }
    WriteTextFile(c.Output("link_strength.csv"), csv);
    if (!f->gains.empty()) {
      if (f->n == 0) throw InvalidArgument("--gains needs --n >= 1");
      std::vector<TransferGainRecord> gains;
      for (const auto& row : ReadCsv(c.Input(f->gains))) {
        if (row.size() < 2) throw IoError(f->gains + ": expected label,gain rows");
        char* end = nullptr;
        const double gain = std::strtod(row[1].c_str(), &end);
        if (end != row[1].c_str() + row[1].size() || !std::isfinite(gain)) {
          throw IoError(f->gains + ": gain '" + row[1] + "' is not a finite number");
        }
        gains.push_back({row[0], gain});
      }
      const GainGroups groups = GroupGains(strengths, gains, f->n);
      json summary = {{"n", f->n},
                      {"low", {{"mean_gain", RoundSignificant(groups.low)},
                               {"labels", groups.low_labels}}},
                      {"top", {{"mean_gain", RoundSignificant(groups.top)},
                               {"labels", groups.top_labels}}}};
      summary["mid"] = groups.mid
                           ? json{{"mean_gain", RoundSignificant(*groups.mid)},
                                  {"labels", groups.mid_labels}}
                           : json(nullptr);
      WriteTextFile(c.Output("gain_groups.json"), summary.dump(2) + "\n");
      *c.out << "low " << FormatDouble(groups.low) << ", mid "
             << (groups.mid ? FormatDouble(*groups.mid) : std::string("absent"))
             << ", top " << FormatDouble(groups.top) << "\n";
    }
    return kExitOk;
  };
}

// ------------------------------------------------------------------ refine

Handler AddRefine(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::string parent, scores, relations, reference;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "refine", "Relabel instances of a parent label with its finer child labels");
  AddCommon(sub, ctx);
  sub->add_option("--parent", f->parent, "Parent label in A")->required();
  sub->add_option("--scores", f->scores, "A's instances scored by B's model")->required();
  sub->add_option("--relations", f->relations, "Typed A<->B relations")->required();
  sub->add_option("--reference", f->reference, "CSV instance_id,label of true fine labels");
  return [f](RunContext& c) {
    const auto records = ReadScoreRecords(c.Input(f->scores));
    const RelationGraph relations = ReadRelations(c.Input(f->relations), "", "");
    std::map<std::string, std::string> reference;
    if (!f->reference.empty()) {
      for (const auto& row : ReadCsv(c.Input(f->reference))) {
        if (row.size() < 2) throw IoError(f->reference + ": expected instance_id,label");
        reference[row[0]] = row[1];
      }
    }
    const RefinementResult result = RefineLabels(
        f->parent, records, relations, f->reference.empty() ? nullptr : &reference);
    std::string csv = "instance_id,fine_label\n";
    for (const auto& [id, label] : result.labels) csv += CsvLine({id, label});
    WriteTextFile(c.Output("refined.csv"), csv);
    json confusion = json::array();
    for (const auto& [key, count] : result.confusion) {
      confusion.push_back({{"reference", key.first}, {"predicted", key.second},
                           {"count", count}});
    }
    json summary = {{"parent", f->parent},
                    {"children", result.children},
                    {"instances", result.labels.size()},
                    {"confusion", std::move(confusion)}};
    summary["top1_accuracy"] = result.top1_accuracy
                                   ? json(RoundSignificant(*result.top1_accuracy))
                                   : json(nullptr);
    WriteTextFile(c.Output("refine_summary.json"), summary.dump(2) + "\n");
    *c.out << result.labels.size() << " instances refined into "
           << result.children.size() << " children";
    if (result.top1_accuracy) {
      *c.out << ", top-1 accuracy " << FormatDouble(*result.top1_accuracy);
    }
    *c.out << "\n";
    return kExitOk;
  };
}

// ----------------------------------------------------------------- cluster

Handler AddCluster(CLI::App& app, RunContext& ctx) {
  struct Flags {
    std::vector<std::string> embeddings;
    std::size_t k = 6;
    std::uint64_t seed = kDefaultClusterSeed;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand(
      "cluster", "k-means over instance embeddings of one or more datasets");
  AddCommon(sub, ctx);
  sub->add_option("--embeddings", f->embeddings, "embeddings.jsonl files")->required();
  sub->add_option("--k", f->k, "Number of clusters")->capture_default_str();
  sub->add_option("--seed", f->seed, "Seed of k-means++")->capture_default_str();
  return [f](RunContext& c) {
    std::vector<EmbeddingRecord> records;
    for (const std::string& path : f->embeddings) {
      for (EmbeddingRecord& r : ReadEmbeddingRecords(c.Input(path))) {
        if (r.source_dataset.empty()) r.source_dataset = fs::path(path).stem().string();
        records.push_back(std::move(r));
      }
    }
    const ClusteringResult result = ClusterEmbeddings(records, f->k, f->seed);
    std::string clusters = "instance_id,source_dataset,true_label,cluster\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      clusters += CsvLine({records[i].instance_id, records[i].source_dataset,
                           records[i].true_label, std::to_string(result.assignment[i])});
    }
    std::string composition = "cluster,dataset,count\n";
    for (std::size_t k = 0; k < result.composition.size(); ++k) {
      for (std::size_t d = 0; d < result.datasets.size(); ++d) {
        composition += CsvLine({std::to_string(k), result.datasets[d],
                                std::to_string(result.composition[k][d])});
      }
    }
    WriteTextFile(c.Output("clusters.csv"), clusters);
    WriteTextFile(c.Output("composition.csv"), composition);
    *c.out << records.size() << " embeddings in " << f->k << " clusters after "
           << result.iterations << " iterations\n";
    return kExitOk;
  };
}

// ------------------------------------------------------------------- synth

Handler AddSynth(CLI::App& app, RunContext& ctx) {
  struct Flags {
    int concepts = 20, labels_a = 8, labels_b = 8, per_concept = 50;
    double sigma = 0.05;
    std::uint64_t seed = 1;
    std::string world;
  };
  auto f = std::make_shared<Flags>();
  CLI::App* sub = app.add_subcommand("synth", "Synthetic label spaces and score records");
  AddCommon(sub, ctx);
  sub->add_option("--concepts", f->concepts, "Number of latent concepts")
      ->capture_default_str();
  sub->add_option("--labels-a", f->labels_a, "Labels in A")->capture_default_str();
  sub->add_option("--labels-b", f->labels_b, "Labels in B")->capture_default_str();
  sub->add_option("--sigma", f->sigma, "Score noise")->capture_default_str();
  sub->add_option("--per-concept", f->per_concept, "Instances per concept and label")
      ->capture_default_str();
  sub->add_option("--seed", f->seed, "Random seed")->capture_default_str();
  sub->add_option("--world", f->world, "Use this world.json instead of a random one");
  return [f](RunContext& c) {
    LatentWorld world =
        f->world.empty()
            ? RandomWorld(f->concepts, f->labels_a, f->labels_b, f->sigma,
                          f->per_concept, f->seed)
            : ParseWorld(ReadTextFile(c.Input(f->world)), f->world);
    const SyntheticInstances instances = GenerateInstances(world);
    WriteTextFile(c.Output("world.json"), SerializeWorld(world));
    WriteLabelSpace(c.Output("labelspace_a.json"), world.space_a.ToLabelSpace());
    WriteLabelSpace(c.Output("labelspace_b.json"), world.space_b.ToLabelSpace());
    WriteScoreRecords(c.Output("scores_ab.jsonl"), instances.b_under_a);
    WriteScoreRecords(c.Output("scores_ba.jsonl"), instances.a_under_b);
    WriteRelations(c.Output("true_relations.jsonl"), TrueRelations(world));
    *c.out << instances.b_under_a.size() + instances.a_under_b.size()
           << " synthetic records\n";
    return kExitOk;
  };
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discover and evaluate relations between the labels of two datasets",
               "labelrel"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "TOML/INI config file; flags win on conflict");
  app.set_version_flag("--version", kVersion);

  RunContext ctx;
  ctx.out = &out;
  std::map<std::string, Handler> handlers;
  using Adder = Handler (*)(CLI::App&, RunContext&);
  for (Adder add :
       {AddValidate, AddAggregate, AddDiscover, AddClassifyTypes, AddTaxonomyRelate,
        AddEmbedRelate, AddCombine, AddCalibrate, AddGtDerive, AddGtCompose, AddEvalPr,
        AddEvalTypes, AddTransferStrength, AddRefine, AddCluster, AddSynth}) {
    Handler handler = add(app, ctx);
    handlers[app.get_subcommands({}).back()->get_name()] = std::move(handler);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  int code = kExitOk;
  try {
    code = handlers.at(sub->get_name())(ctx);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    WriteManifest(ctx, *sub, code);
  } catch (const std::exception& e) {
    err << "I/O error: cannot write manifest: " << e.what() << "\n";
    return kExitIo;
  }
  return code;
}

}  // namespace labelrel::cli
