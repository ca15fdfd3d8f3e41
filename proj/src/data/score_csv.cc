// Copyright 2026 The LLSH Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "llsh/data/score_csv.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "csv_rows.h"
#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"

namespace llsh {

std::string format_scores(std::span<const double> scores) {
  std::string out = "frame_index,score\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, scores[i]);
    out += buf;
  }
  return out;
}

std::vector<double> parse_scores(std::string_view text, std::string_view source) {
  const auto fields = internal::indexed_rows(text, "frame_index,score", source);
  std::vector<double> scores(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string field(fields[i]);
    char* end = nullptr;
    scores[i] = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || std::isnan(scores[i])) {
      throw DataError(std::string(source) + ": frame " + std::to_string(i) + " has score '" +
                      field + "'");
    }
  }
  return scores;
}

void save_scores(std::span<const double> scores, const std::filesystem::path& path) {
  const std::string text = format_scores(scores);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<double> load_scores(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_scores(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                      path.string());
}

}  // namespace llsh
