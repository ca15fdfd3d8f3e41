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

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "llsh/common/error.h"

namespace llsh::internal {

// Splits "index,value" CSV text after checking the header. Rows must carry
// dense indices starting at 0. Returns the value fields.
inline std::vector<std::string_view> indexed_rows(std::string_view text, std::string_view header,
                                                  std::string_view source) {
  std::vector<std::string_view> values;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    if (!seen_header) {
      if (line != header) {
        throw DataError(where() + "expected header '" + std::string(header) + "', got '" +
                        std::string(line) + "'");
      }
      seen_header = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) throw DataError(where() + "expected two comma-separated fields");
    const std::string_view index_field = line.substr(0, comma);
    std::uint64_t index = 0;
    auto [ptr, ec] = std::from_chars(index_field.data(), index_field.data() + index_field.size(), index);
    if (ec != std::errc() || ptr != index_field.data() + index_field.size()) {
      throw DataError(where() + "bad frame index '" + std::string(index_field) + "'");
    }
    if (index != values.size()) {
      throw DataError(where() + "frame index " + std::to_string(index) + ", expected " +
                      std::to_string(values.size()));
    }
    values.push_back(line.substr(comma + 1));
  }
  if (!seen_header) throw DataError(std::string(source) + ": empty file, expected header");
  return values;
}

}  // namespace llsh::internal
