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

#include "llsh/scoring.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "llsh/common/error.h"
#include "llsh/common/parallel.h"
#include "llsh/simd/kernels.h"

namespace llsh {

std::string_view metric_name(Metric m) { return m == Metric::kEuclidean ? "euclidean" : "cosine"; }

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "cosine") return Metric::kCosine;
  throw UsageError("unknown metric '" + std::string(name) + "' (expected euclidean|cosine)");
}

void QueryConfig::validate() const {
  if (sentinel && !(*sentinel > 0.0)) throw UsageError("query: sentinel must be > 0");
  if (!(smooth_sigma >= 0.0) || !std::isfinite(smooth_sigma)) {
    throw UsageError("query: smoothing sigma must be finite and >= 0");
  }
}

double QueryConfig::sentinel_for(std::uint32_t code_len) const {
  return sentinel.value_or(std::sqrt(static_cast<double>(code_len)));
}

double code_distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  if (metric == Metric::kEuclidean) return std::sqrt(simd::squared_l2(a, b));
  const double denom = std::sqrt(simd::dot(a, a) * simd::dot(b, b));
  if (!(denom > 0.0)) return 1.0;
  return 1.0 - simd::dot(a, b) / denom;
}

double bucket_distance(const HashIndex& index, std::uint32_t table, std::span<const float> code,
                       const QueryConfig& config, OpCounter* counter) {
  const std::uint32_t r = index.code_len();
  if (code.size() != r) {
    throw DataError("bucket_distance: code has length " + std::to_string(code.size()) +
                    ", index expects r=" + std::to_string(r));
  }
  const Bucket* bucket = index.table(table).find(binarize(code));
  if (bucket == nullptr) return config.sentinel_for(r);

  if (index.variant() == IndexVariant::kLight) {
    if (counter) {
      counter->multiplications += r;
      counter->codes_compared += 1;
    }
    return code_distance(code, bucket->payload, config.metric);
  }
  double total = 0.0;
  for (std::uint64_t i = 0; i < bucket->count; ++i) {
    total += code_distance(code, bucket->code(i, r), config.metric);
  }
  if (counter) {
    counter->multiplications += bucket->count * r;
    counter->codes_compared += bucket->count;
  }
  return total / static_cast<double>(bucket->count);
}

double anomaly_score(const HashIndex& index, const HashEncoder& encoder,
                     std::span<const float> feature, const QueryConfig& config,
                     OpCounter* counter) {
  if (encoder.code_len() != index.code_len() || encoder.num_tables() != index.num_tables()) {
    throw DataError("anomaly_score: encoder and index disagree on r or b");
  }
  const ConcatCode code = encoder.encode(feature);
  if (counter) {
    counter->multiplications +=
        std::uint64_t{encoder.feature_dim()} * encoder.code_len() * encoder.num_tables();
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t j = 0; j < index.num_tables(); ++j) {
    best = std::min(best, bucket_distance(index, j, code.layer(j), config, counter));
  }
  return best;
}

std::vector<double> score_features(const HashIndex& index, const HashEncoder& encoder,
                                   const FeatureMatrix& features, const QueryConfig& config) {
  std::vector<double> scores(features.rows());
  parallel_for(features.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      scores[i] = anomaly_score(index, encoder, features.row(i), config);
    }
  });
  return scores;
}

std::vector<double> assemble_frames(std::span<const double> feature_scores,
                                    std::span<const FrameSpan> spans, std::uint64_t frame_count) {
  if (feature_scores.size() != spans.size()) {
    throw DataError("assemble_frames: " + std::to_string(feature_scores.size()) +
                    " scores for " + std::to_string(spans.size()) + " spans");
  }
  std::vector<double> sum(frame_count, 0.0);
  std::vector<std::uint32_t> hits(frame_count, 0);
  for (std::size_t f = 0; f < spans.size(); ++f) {
    const FrameSpan& s = spans[f];
    if (s.length == 0 || s.start_frame >= frame_count || s.length > frame_count - s.start_frame) {
      throw DataError("assemble_frames: feature " + std::to_string(f) + " spans frames [" +
                      std::to_string(s.start_frame) + ", " +
                      std::to_string(s.start_frame + s.length) + ") outside [0, " +
                      std::to_string(frame_count) + ")");
    }
    for (std::uint64_t t = s.start_frame; t < s.start_frame + s.length; ++t) {
      sum[t] += feature_scores[f];
      ++hits[t];
    }
  }

  std::vector<double> frames(frame_count, 0.0);
  constexpr auto kNone = std::numeric_limits<std::uint64_t>::max();
  // Nearest covered frame on each side.
  std::vector<std::uint64_t> left(frame_count, kNone);
  std::uint64_t last = kNone;
  for (std::uint64_t t = 0; t < frame_count; ++t) {
    if (hits[t] > 0) last = t;
    left[t] = last;
  }
  if (last == kNone) throw DataError("assemble_frames: no frame is covered by any feature");
  std::uint64_t next = kNone;
  for (std::uint64_t t = frame_count; t-- > 0;) {
    if (hits[t] > 0) {
      next = t;
      frames[t] = sum[t] / hits[t];
      continue;
    }
    std::uint64_t src;
    if (left[t] == kNone) {
      src = next;
    } else if (next == kNone) {
      src = left[t];
    } else {
      src = (t - left[t] <= next - t) ? left[t] : next;
    }
    frames[t] = sum[src] / hits[src];
  }
  return frames;
}

std::vector<double> smooth(std::span<const double> series, double sigma) {
  std::vector<double> out(series.begin(), series.end());
  if (sigma == 0.0 || series.empty()) return out;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("smooth: sigma must be >= 0");

  const auto radius = static_cast<std::int64_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (std::int64_t k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    kernel[k + radius] = w;
    total += w;
  }
  for (double& w : kernel) w /= total;

  const auto n = static_cast<std::int64_t>(series.size());
  auto reflect = [n](std::int64_t p) {
    std::int64_t q = p % (2 * n);
    if (q < 0) q += 2 * n;
    return q < n ? q : 2 * n - 1 - q;
  };
  for (std::int64_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::int64_t k = -radius; k <= radius; ++k) {
      acc += kernel[k + radius] * series[reflect(i + k)];
    }
    out[i] = acc;
  }
  return out;
}

void minmax_normalize(std::span<double> series) {
  if (series.empty()) return;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : series) v = range > 0.0 ? (v - min) / range : 0.0;
}

ScoreSeries finalize_series(std::string video_id, std::span<const double> feature_scores,
                            std::span<const FrameSpan> spans, std::uint64_t frame_count,
                            const QueryConfig& config) {
  config.validate();
  ScoreSeries series{std::move(video_id), {}};
  series.scores = smooth(assemble_frames(feature_scores, spans, frame_count), config.smooth_sigma);
  if (config.per_video_minmax) minmax_normalize(series.scores);
  return series;
}

ScoreSeries score_video(const HashIndex& index, const HashEncoder& encoder,
                        const FeatureMatrix& features, std::span<const FrameSpan> spans,
                        std::uint64_t frame_count, const QueryConfig& config,
                        std::string video_id) {
  config.validate();
  const std::vector<double> raw = score_features(index, encoder, features, config);
  return finalize_series(std::move(video_id), raw, spans, frame_count, config);
}

}  // namespace llsh
