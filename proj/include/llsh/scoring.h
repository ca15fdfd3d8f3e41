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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llsh/encoder.h"
#include "llsh/features.h"
#include "llsh/index.h"

namespace llsh {

enum class Metric { kEuclidean, kCosine };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);

struct QueryConfig {
  // Distance assigned to a lookup that misses; sqrt(r) when unset.
  std::optional<double> sentinel;
  Metric metric = Metric::kEuclidean;
  // Gaussian smoothing width in frames; 0 disables smoothing.
  double smooth_sigma = 10.0;
  bool per_video_minmax = false;

  void validate() const;
  double sentinel_for(std::uint32_t code_len) const;
};

// Instrumentation for the multiplication-count cost model: encoding charges
// d*r*b per feature, every code-to-code distance charges r.
struct OpCounter {
  std::uint64_t multiplications = 0;
  std::uint64_t codes_compared = 0;
};

double code_distance(std::span<const float> a, std::span<const float> b, Metric metric);

// Average distance between code and the bucket its key selects in table j
// (full), or distance to the bucket mean (light). Missing key -> sentinel.
double bucket_distance(const HashIndex& index, std::uint32_t table, std::span<const float> code,
                       const QueryConfig& config, OpCounter* counter = nullptr);

// Minimum of bucket_distance over all b tables.
double anomaly_score(const HashIndex& index, const HashEncoder& encoder,
                     std::span<const float> feature, const QueryConfig& config,
                     OpCounter* counter = nullptr);

// anomaly_score for every row, computed in parallel.
std::vector<double> score_features(const HashIndex& index, const HashEncoder& encoder,
                                   const FeatureMatrix& features, const QueryConfig& config);

struct ScoreSeries {
  std::string video_id;
  std::vector<double> scores;  // one per frame
};

// Per-frame mean of the scores of all features covering the frame; frames
// covered by none take the score of the nearest covered frame (the earlier
// one on ties). Throws DataError on spans leaving [0, frame_count) or when no
// frame is covered at all.
std::vector<double> assemble_frames(std::span<const double> feature_scores,
                                    std::span<const FrameSpan> spans, std::uint64_t frame_count);

// Gaussian filter: kernel radius ceil(3 sigma), weights normalized to sum 1,
// half-sample symmetric (reflect) boundary. sigma = 0 returns the input.
std::vector<double> smooth(std::span<const double> series, double sigma);

// Affine map onto [0, 1]; a constant series becomes all zeros.
void minmax_normalize(std::span<double> series);

// Frame assembly, smoothing and optional min-max applied to per-feature
// scores; shared by the hashing scorer and the baselines.
ScoreSeries finalize_series(std::string video_id, std::span<const double> feature_scores,
                            std::span<const FrameSpan> spans, std::uint64_t frame_count,
                            const QueryConfig& config);

ScoreSeries score_video(const HashIndex& index, const HashEncoder& encoder,
                        const FeatureMatrix& features, std::span<const FrameSpan> spans,
                        std::uint64_t frame_count, const QueryConfig& config,
                        std::string video_id = {});

}  // namespace llsh
