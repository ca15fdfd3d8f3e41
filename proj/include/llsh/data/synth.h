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
#include <string>
#include <string_view>
#include <vector>

#include "llsh/features.h"

namespace llsh {

struct SynthConfig {
  std::uint32_t d = 64;
  std::uint32_t num_modes = 16;
  // Mode weights fall off as 1 / (rank + 1)^mode_skew.
  double mode_skew = 1.0;
  // Norm of the within-mode Gaussian offset before projecting to the sphere.
  double mode_spread = 0.5;
  std::uint32_t train_count = 5000;
  std::uint32_t videos = 12;
  std::uint32_t frames_per_video = 600;
  // Fraction of each test video's frames inside its anomalous segment.
  double anomaly_rate = 0.2;
  // Norm of the displacement applied to anomalous snippets.
  double anomaly_shift = 0.8;
  // AR(1) coefficient between consecutive snippets' noise.
  double temporal_correlation = 0.9;
  // Per-snippet probability of moving to another mode.
  double mode_switch_prob = 0.05;
  std::uint32_t snippet_len = 16;
  std::uint32_t snippet_stride = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

// Named presets: "default" (the desk-scale benchmark) and "small" (fast tests).
SynthConfig synth_preset(std::string_view name);

struct SynthVideo {
  std::string id;
  FeatureMatrix features;
  std::vector<FrameSpan> spans;
  std::uint64_t frame_count = 0;
  std::vector<std::uint8_t> labels;
};

struct SynthCorpus {
  SynthConfig config;
  FeatureMatrix train;
  std::vector<SynthVideo> test;
};

// Training features: i.i.d. draws from a skewed mixture of modes on the unit
// sphere. Test videos: snippets walking through modes with correlated noise;
// one contiguous segment per video is pushed off the modes and labeled 1.
SynthCorpus generate_synthetic(const SynthConfig& config);

// Writes train.fvs, <id>.fvs, <id>.labels.csv and manifest.json into dir.
// Returns the manifest path.
std::filesystem::path write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace llsh
