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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llsh {

// CSV "frame_index,label": header line, then one row per frame with dense
// indices from 0 and labels 0 or 1.
std::vector<std::uint8_t> parse_labels(std::string_view text, std::string_view source);
std::string format_labels(std::span<const std::uint8_t> labels);

// expected_frames, when given, must equal the number of rows.
std::vector<std::uint8_t> load_labels(const std::filesystem::path& path,
                                      std::optional<std::uint64_t> expected_frames = {});
void save_labels(std::span<const std::uint8_t> labels, const std::filesystem::path& path);

}  // namespace llsh
