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

// Small builders shared by the test binaries.

#ifndef LABELREL_TESTS_TEST_UTIL_H_
#define LABELREL_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "labelrel/random.h"
#include "labelrel/types.h"

namespace labelrel::testing {

inline LabelSpace Space(const std::string& dataset, std::vector<std::string> labels) {
  return LabelSpace(dataset, std::move(labels));
}

inline DenseMatrix Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  DenseMatrix out(n, m);
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) out(r, c++) = v;
    ++r;
  }
  return out;
}

inline DirectionalScoreMatrix Directional(const LabelSpace& from, const LabelSpace& to,
                                          DenseMatrix values) {
  DirectionalScoreMatrix s;
  s.from_space = from;
  s.to_space = to;
  s.values = std::move(values);
  s.support.assign(to.size(), 1);
  return s;
}

inline LabeledMatrix Labeled(const LabelSpace& rows, const LabelSpace& cols,
                             DenseMatrix values) {
  return LabeledMatrix{rows, cols, std::move(values)};
}

inline RelationEdge Edge(double strength, std::optional<RelationType> type = std::nullopt) {
  RelationEdge e;
  e.strength = strength;
  e.type = type;
  return e;
}

inline RelationGraph Graph(
    std::initializer_list<std::pair<const char*, const char*>> pairs,
    const std::string& sa = "A", const std::string& sb = "B") {
  RelationGraph g(sa, sb);
  for (const auto& [a, b] : pairs) g.AddEdge(a, b, Edge(1.0));
  return g;
}

inline std::vector<std::string> Names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("labelrel_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace labelrel::testing

#endif  // LABELREL_TESTS_TEST_UTIL_H_
