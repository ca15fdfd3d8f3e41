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

#include "llsh/data/labels.h"


#include "csv_rows.h"
#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"

namespace llsh {

std::vector<std::uint8_t> parse_labels(std::string_view text, std::string_view source) {
  const auto fields = internal::indexed_rows(text, "frame_index,label", source);
  std::vector<std::uint8_t> labels(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "0") {
      labels[i] = 0;
    } else if (fields[i] == "1") {
      labels[i] = 1;
    } else {
      throw DataError(std::string(source) + ": frame " + std::to_string(i) + " has label '" +
                      std::string(fields[i]) + "', expected 0 or 1");
    }
  }
  return labels;
}

std::string format_labels(std::span<const std::uint8_t> labels) {
  std::string out = "frame_index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += labels[i] ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<std::uint8_t> load_labels(const std::filesystem::path& path,
                                      std::optional<std::uint64_t> expected_frames) {
  const auto bytes = read_file(path);
  auto labels = parse_labels(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), path.string());
  if (expected_frames && labels.size() != *expected_frames) {
    throw DataError(path.string() + ": " + std::to_string(labels.size()) +
                    " labels, video has " + std::to_string(*expected_frames) + " frames");
  }
  return labels;
}

void save_labels(std::span<const std::uint8_t> labels, const std::filesystem::path& path) {
  const std::string text = format_labels(labels);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace llsh
