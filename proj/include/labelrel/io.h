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

// Readers and writers for the on-disk formats:
//   labelspace.json   {"dataset": str, "labels": [str]}
//   scores.jsonl      one InstanceScoreRecord per line
//   embeddings.jsonl  one EmbeddingRecord per line
//   relations.jsonl   {"a": str, "b": str, "strength": float, "type": str}
//   matrix json       directional score matrices and labeled matrices
//
// Parse errors raise IoError with "<source>:<line>:" context. Floating point
// values are written with 9 significant digits.

#ifndef LABELREL_IO_H_
#define LABELREL_IO_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelrel/types.h"

namespace labelrel {

// Rounds to 9 significant digits (the precision of every written float).
double RoundSignificant(double value);
// "%.9g" formatting.
std::string FormatDouble(double value);

std::string ReadTextFile(const std::filesystem::path& path);
// Creates parent directories as needed.
void WriteTextFile(const std::filesystem::path& path, std::string_view content);

LabelSpace ParseLabelSpace(std::string_view text, std::string_view source);
std::string SerializeLabelSpace(const LabelSpace& space);
LabelSpace ReadLabelSpace(const std::filesystem::path& path);
void WriteLabelSpace(const std::filesystem::path& path, const LabelSpace& space);

std::vector<InstanceScoreRecord> ParseScoreRecords(std::string_view text,
                                                   std::string_view source);
std::string SerializeScoreRecords(std::span<const InstanceScoreRecord> records);
std::vector<InstanceScoreRecord> ReadScoreRecords(const std::filesystem::path& path);
void WriteScoreRecords(const std::filesystem::path& path,
                       std::span<const InstanceScoreRecord> records);

std::vector<EmbeddingRecord> ParseEmbeddingRecords(std::string_view text,
                                                   std::string_view source);
std::string SerializeEmbeddingRecords(std::span<const EmbeddingRecord> records);
std::vector<EmbeddingRecord> ReadEmbeddingRecords(const std::filesystem::path& path);
void WriteEmbeddingRecords(const std::filesystem::path& path,
                           std::span<const EmbeddingRecord> records);

// The type field is "untyped" for edges without a type. Optional fields
// "relaxed" and "count" are written only when set.
RelationGraph ParseRelations(std::string_view text, std::string_view source,
                             std::string space_a, std::string space_b);
std::string SerializeRelations(const RelationGraph& graph);
RelationGraph ReadRelations(const std::filesystem::path& path, std::string space_a,
                            std::string space_b);
void WriteRelations(const std::filesystem::path& path, const RelationGraph& graph);

// Pair types in a relations file, ignoring strengths.
TypedPairSet ReadTypedPairs(const std::filesystem::path& path);

DirectionalScoreMatrix ParseDirectionalMatrix(std::string_view text,
                                              std::string_view source);
std::string SerializeDirectionalMatrix(const DirectionalScoreMatrix& matrix);
DirectionalScoreMatrix ReadDirectionalMatrix(const std::filesystem::path& path);
void WriteDirectionalMatrix(const std::filesystem::path& path,
                            const DirectionalScoreMatrix& matrix);

LabeledMatrix ParseLabeledMatrix(std::string_view text, std::string_view source);
std::string SerializeLabeledMatrix(const LabeledMatrix& matrix);
LabeledMatrix ReadLabeledMatrix(const std::filesystem::path& path);
void WriteLabeledMatrix(const std::filesystem::path& path, const LabeledMatrix& matrix);

// Per-pixel scores of one instance; columns follow a sidecar label order.
struct PixelScoreRecord {
  std::string instance_id;
  std::string true_label;
  std::optional<double> self_score;
  std::vector<std::vector<double>> rows;
};

std::vector<PixelScoreRecord> ReadPixelScores(const std::filesystem::path& path);
// Sidecar header: a JSON array of label names, background included.
std::vector<std::string> ReadLabelOrder(const std::filesystem::path& path);

// Comma separated rows with the header line removed. Blank lines skipped.
std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path);

}  // namespace labelrel

#endif  // LABELREL_IO_H_
