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
#include <string_view>
#include <vector>

#include "llsh/features.h"

namespace llsh {

// Binary feature container:
//   "LLSHFVS1" | u32 d | u64 count | u8 flags (bit 0: timestamps)
//   count records of d little-endian f32, each followed by u64 start_frame
//   and u32 span when bit 0 is set.
struct FeatureFile {
  FeatureMatrix features;
  std::optional<std::vector<FrameSpan>> spans;

  std::vector<std::uint8_t> serialize() const;
  static FeatureFile deserialize(std::span<const std::uint8_t> bytes, std::string_view source);

  // Spans if present, else feature i covering frame i alone.
  std::vector<FrameSpan> spans_or_identity() const;
};

void save_features(const FeatureFile& file, const std::filesystem::path& path);
FeatureFile load_features(const std::filesystem::path& path);

}  // namespace llsh
