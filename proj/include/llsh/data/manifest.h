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
#include <string>
#include <vector>

#include "llsh/data/feature_file.h"

namespace llsh {

struct VideoEntry {
  std::string id;
  std::filesystem::path features;  // resolved against the manifest directory
  std::optional<std::uint64_t> frame_count;
  std::optional<std::filesystem::path> labels;
};

// JSON document:
//   {"dataset": str, "feature_dim": int,
//    "train": [{"id", "features", ["frame_count"]}, ...],
//    "test":  [{"id", "features", "frame_count", "labels"}, ...]}
// Relative paths are taken relative to the manifest file.
struct DatasetManifest {
  std::string dataset;
  std::uint32_t feature_dim = 0;
  std::vector<VideoEntry> train;
  std::vector<VideoEntry> test;
};

// Parses and validates: required fields, unique ids, referenced files exist,
// test videos carry frame_count and labels.
DatasetManifest load_manifest(const std::filesystem::path& path);
// Paths are written relative to the manifest's directory when possible.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct LoadedVideo {
  std::string id;
  FeatureFile file;
  std::uint64_t frame_count = 0;
  std::vector<std::uint8_t> labels;  // empty when the entry has none
};

// Loads and cross-checks one entry: feature dimension, spans inside the
// video, label count equal to frame_count.
LoadedVideo load_video(const VideoEntry& entry, std::uint32_t feature_dim);

// All train entries stacked into one matrix.
FeatureMatrix load_train_features(const DatasetManifest& manifest);
std::vector<LoadedVideo> load_test_videos(const DatasetManifest& manifest);

}  // namespace llsh
