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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llsh {

// CSV "frame_index,score", dense indices from 0. Scores are written with 17
// significant digits so a read returns the exact doubles.
std::string format_scores(std::span<const double> scores);
std::vector<double> parse_scores(std::string_view text, std::string_view source);

void save_scores(std::span<const double> scores, const std::filesystem::path& path);
std::vector<double> load_scores(const std::filesystem::path& path);

}  // namespace llsh
