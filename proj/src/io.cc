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

#include "labelrel/io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace labelrel {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string Context(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

// Calls fn(json, line_number) for every non-blank line.
template <typename Fn>
void ForEachJsonLine(std::string_view text, std::string_view source, Fn&& fn) {
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_number;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      fn(json::parse(line), line_number);
    } catch (const json::exception& e) {
      throw IoError(Context(source, line_number) + e.what());
    } catch (const InvalidArgument& e) {
      throw IoError(Context(source, line_number) + e.what());
    }
    if (end == text.size()) break;
  }
}

json ParseDocument(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string(source) + ": " + e.what());
  }
}

// Wraps conversion errors of a whole-document format.
template <typename Fn>
auto Convert(std::string_view source, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw IoError(std::string(source) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string(source) + ": " + e.what());
  }
}

json Rounded(double v) { return RoundSignificant(v); }

json MatrixToJson(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(Rounded(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

DenseMatrix MatrixFromJson(const json& rows, std::size_t num_rows,
                           std::size_t num_cols) {
  if (!rows.is_array() || rows.size() != num_rows) {
    throw InvalidArgument("matrix has wrong number of rows");
  }
  DenseMatrix m(num_rows, num_cols);
  for (std::size_t r = 0; r < num_rows; ++r) {
    if (!rows[r].is_array() || rows[r].size() != num_cols) {
      throw InvalidArgument("matrix row " + std::to_string(r) +
                            " has wrong number of columns");
    }
    for (std::size_t c = 0; c < num_cols; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

std::string JoinLines(const std::vector<json>& lines) {
  std::string out;
  for (const json& line : lines) {
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

double RoundSignificant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return std::strtod(buffer, nullptr);
}

std::string FormatDouble(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return buffer.str();
}

void WriteTextFile(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

LabelSpace ParseLabelSpace(std::string_view text, std::string_view source) {
  json doc = ParseDocument(text, source);
  return Convert(source, [&] {
    return LabelSpace(doc.at("dataset").get<std::string>(),
                      doc.at("labels").get<std::vector<std::string>>());
  });
}

std::string SerializeLabelSpace(const LabelSpace& space) {
  json doc = {{"dataset", space.dataset_id()}, {"labels", space.labels()}};
  return doc.dump(2) + "\n";
}

LabelSpace ReadLabelSpace(const fs::path& path) {
  return ParseLabelSpace(ReadTextFile(path), path.string());
}

void WriteLabelSpace(const fs::path& path, const LabelSpace& space) {
  WriteTextFile(path, SerializeLabelSpace(space));
}

std::vector<InstanceScoreRecord> ParseScoreRecords(std::string_view text,
                                                   std::string_view source) {
  std::vector<InstanceScoreRecord> records;
  ForEachJsonLine(text, source, [&](const json& j, std::size_t) {
    InstanceScoreRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.source_dataset = j.value("source_dataset", std::string());
    r.true_label = j.at("true_label").get<std::string>();
    r.self_score = j.at("self_score").get<double>();
    r.foreign_scores = j.at("foreign_scores").get<std::map<std::string, double>>();
    records.push_back(std::move(r));
  });
  return records;
}

std::string SerializeScoreRecords(std::span<const InstanceScoreRecord> records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const InstanceScoreRecord& r : records) {
    json scores = json::object();
    for (const auto& [label, p] : r.foreign_scores) scores[label] = Rounded(p);
    lines.push_back({{"instance_id", r.instance_id},
                     {"source_dataset", r.source_dataset},
                     {"true_label", r.true_label},
                     {"self_score", Rounded(r.self_score)},
                     {"foreign_scores", std::move(scores)}});
  }
  return JoinLines(lines);
}

std::vector<InstanceScoreRecord> ReadScoreRecords(const fs::path& path) {
  return ParseScoreRecords(ReadTextFile(path), path.string());
}

void WriteScoreRecords(const fs::path& path,
                       std::span<const InstanceScoreRecord> records) {
  WriteTextFile(path, SerializeScoreRecords(records));
}

std::vector<EmbeddingRecord> ParseEmbeddingRecords(std::string_view text,
                                                   std::string_view source) {
  std::vector<EmbeddingRecord> records;
  std::size_t dimension = 0;
  ForEachJsonLine(text, source, [&](const json& j, std::size_t) {
    EmbeddingRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.true_label = j.at("true_label").get<std::string>();
    r.source_dataset = j.value("source_dataset", std::string());
    r.vector = j.at("vector").get<std::vector<double>>();
    for (double v : r.vector) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("non-finite entry in vector of '" + r.instance_id + "'");
      }
    }
    if (records.empty()) {
      dimension = r.vector.size();
    } else if (r.vector.size() != dimension) {
      throw InvalidArgument("vector of '" + r.instance_id + "' has dimension " +
                            std::to_string(r.vector.size()) + ", expected " +
                            std::to_string(dimension));
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::string SerializeEmbeddingRecords(std::span<const EmbeddingRecord> records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const EmbeddingRecord& r : records) {
    json vec = json::array();
    for (double v : r.vector) vec.push_back(Rounded(v));
    json line = {{"instance_id", r.instance_id},
                 {"true_label", r.true_label},
                 {"vector", std::move(vec)}};
    if (!r.source_dataset.empty()) line["source_dataset"] = r.source_dataset;
    lines.push_back(std::move(line));
  }
  return JoinLines(lines);
}

std::vector<EmbeddingRecord> ReadEmbeddingRecords(const fs::path& path) {
  return ParseEmbeddingRecords(ReadTextFile(path), path.string());
}

void WriteEmbeddingRecords(const fs::path& path,
                           std::span<const EmbeddingRecord> records) {
  WriteTextFile(path, SerializeEmbeddingRecords(records));
}

RelationGraph ParseRelations(std::string_view text, std::string_view source,
                             std::string space_a, std::string space_b) {
  RelationGraph graph(std::move(space_a), std::move(space_b));
  ForEachJsonLine(text, source, [&](const json& j, std::size_t) {
    RelationEdge edge;
    edge.strength = j.value("strength", 0.0);
    const std::string type = j.value("type", std::string("untyped"));
    if (type != "untyped") edge.type = ParseRelationType(type);
    edge.relaxed = j.value("relaxed", false);
    if (j.contains("count")) edge.count = j.at("count").get<std::size_t>();
    graph.AddEdge(j.at("a").get<std::string>(), j.at("b").get<std::string>(), edge);
  });
  return graph;
}

std::string SerializeRelations(const RelationGraph& graph) {
  std::vector<json> lines;
  lines.reserve(graph.size());
  for (const auto& [pair, edge] : graph.edges()) {
    json line = {{"a", pair.a},
                 {"b", pair.b},
                 {"strength", Rounded(edge.strength)},
                 {"type", edge.type ? std::string(ToString(*edge.type))
                                    : std::string("untyped")}};
    if (edge.relaxed) line["relaxed"] = true;
    if (edge.count) line["count"] = *edge.count;
    lines.push_back(std::move(line));
  }
  return JoinLines(lines);
}

RelationGraph ReadRelations(const fs::path& path, std::string space_a,
                            std::string space_b) {
  return ParseRelations(ReadTextFile(path), path.string(), std::move(space_a),
                        std::move(space_b));
}

void WriteRelations(const fs::path& path, const RelationGraph& graph) {
  WriteTextFile(path, SerializeRelations(graph));
}

TypedPairSet ReadTypedPairs(const fs::path& path) {
  return ReadRelations(path, "", "").TypedPairs();
}

DirectionalScoreMatrix ParseDirectionalMatrix(std::string_view text,
                                              std::string_view source) {
  json doc = ParseDocument(text, source);
  return Convert(source, [&] {
    DirectionalScoreMatrix m;
    m.from_space = LabelSpace(doc.at("from").get<std::string>(),
                              doc.at("rows").get<std::vector<std::string>>());
    m.to_space = LabelSpace(doc.at("to").get<std::string>(),
                            doc.at("cols").get<std::vector<std::string>>());
    m.values = MatrixFromJson(doc.at("values"), m.from_space.size(),
                              m.to_space.size());
    m.support = doc.at("support").get<std::vector<std::size_t>>();
    if (m.support.size() != m.to_space.size()) {
      throw InvalidArgument("support has wrong length");
    }
    m.zero_support = doc.value("zero_support", std::vector<std::string>());
    return m;
  });
}

std::string SerializeDirectionalMatrix(const DirectionalScoreMatrix& m) {
  json doc = {{"from", m.from_space.dataset_id()},
              {"to", m.to_space.dataset_id()},
              {"rows", m.from_space.labels()},
              {"cols", m.to_space.labels()},
              {"values", MatrixToJson(m.values)},
              {"support", m.support},
              {"zero_support", m.zero_support}};
  return doc.dump() + "\n";
}

DirectionalScoreMatrix ReadDirectionalMatrix(const fs::path& path) {
  return ParseDirectionalMatrix(ReadTextFile(path), path.string());
}

void WriteDirectionalMatrix(const fs::path& path, const DirectionalScoreMatrix& m) {
  WriteTextFile(path, SerializeDirectionalMatrix(m));
}

LabeledMatrix ParseLabeledMatrix(std::string_view text, std::string_view source) {
  json doc = ParseDocument(text, source);
  return Convert(source, [&] {
    LabeledMatrix m;
    m.row_space = LabelSpace(doc.at("row_space").get<std::string>(),
                             doc.at("rows").get<std::vector<std::string>>());
    m.col_space = LabelSpace(doc.at("col_space").get<std::string>(),
                             doc.at("cols").get<std::vector<std::string>>());
    m.values = MatrixFromJson(doc.at("values"), m.row_space.size(),
                              m.col_space.size());
    return m;
  });
}

std::string SerializeLabeledMatrix(const LabeledMatrix& m) {
  json doc = {{"row_space", m.row_space.dataset_id()},
              {"col_space", m.col_space.dataset_id()},
              {"rows", m.row_space.labels()},
              {"cols", m.col_space.labels()},
              {"values", MatrixToJson(m.values)}};
  return doc.dump() + "\n";
}

LabeledMatrix ReadLabeledMatrix(const fs::path& path) {
  return ParseLabeledMatrix(ReadTextFile(path), path.string());
}

void WriteLabeledMatrix(const fs::path& path, const LabeledMatrix& m) {
  WriteTextFile(path, SerializeLabeledMatrix(m));
}

std::vector<PixelScoreRecord> ReadPixelScores(const fs::path& path) {
  std::vector<PixelScoreRecord> records;
  ForEachJsonLine(ReadTextFile(path), path.string(), [&](const json& j, std::size_t) {
    PixelScoreRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.true_label = j.at("true_label").get<std::string>();
    if (j.contains("self_score")) r.self_score = j.at("self_score").get<double>();
    r.rows = j.at("rows").get<std::vector<std::vector<double>>>();
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<std::string> ReadLabelOrder(const fs::path& path) {
  json doc = ParseDocument(ReadTextFile(path), path.string());
  return Convert(path.string(), [&] { return doc.get<std::vector<std::string>>(); });
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace labelrel
