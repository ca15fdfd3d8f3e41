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
#include <span>
#include <string>
#include <vector>

namespace llsh {

// Scores and 0/1 labels of one video, frame-aligned.
struct LabeledVideo {
  std::string video_id;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// P(score of a random positive > score of a random negative), ties counted
// 1/2, via midranks. DataError if the lengths differ, a label is not 0/1, or
// only one class is present.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// AUC over all videos concatenated.
double micro_auc(std::span<const LabeledVideo> run);

struct MacroAuc {
  double auc = 0.0;
  std::vector<double> per_video;      // aligned with `used`
  std::vector<std::string> used;
  std::vector<std::string> skipped;   // single-class videos
};

// Unweighted mean of per-video AUCs over videos containing both classes.
// DataError when no video qualifies.
MacroAuc macro_auc(std::span<const LabeledVideo> run);

}  // namespace llsh
