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

#include "llsh/data/synth.h"

#include <cmath>
#include <cstdio>

#include "llsh/common/error.h"
#include "llsh/common/rng.h"
#include "llsh/data/feature_file.h"
#include "llsh/data/labels.h"
#include "llsh/data/manifest.h"

namespace llsh {
namespace {

std::vector<double> gaussian(Rng& rng, std::size_t d, double scale) {
  std::vector<double> v(d);
  for (double& x : v) x = rng.normal() * scale;
  return v;
}

std::vector<double> unit(std::vector<double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return v;
}

std::vector<float> to_sphere(std::span<const double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2);
  std::vector<float> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = static_cast<float>(v[k] * inv);
  return out;
}

std::uint32_t pick_mode(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  for (std::uint32_t c = 0; c < cumulative.size(); ++c) {
    if (u < cumulative[c]) return c;
  }
  return static_cast<std::uint32_t>(cumulative.size() - 1);
}

}  // namespace

void SynthConfig::validate() const {
  if (d < 2) throw UsageError("synth: d must be >= 2");
  if (num_modes == 0) throw UsageError("synth: num_modes must be >= 1");
  if (train_count == 0) throw UsageError("synth: train_count must be >= 1");
  if (!(mode_spread >= 0.0)) throw UsageError("synth: mode_spread must be >= 0");
  if (!(anomaly_rate > 0.0 && anomaly_rate < 1.0)) throw UsageError("synth: anomaly_rate must be in (0, 1)");
  if (!(anomaly_shift > mode_spread)) throw UsageError("synth: anomaly_shift must exceed mode_spread");
  if (!(temporal_correlation >= 0.0 && temporal_correlation < 1.0)) {
    throw UsageError("synth: temporal_correlation must be in [0, 1)");
  }
  if (!(mode_switch_prob >= 0.0 && mode_switch_prob <= 1.0)) {
    throw UsageError("synth: mode_switch_prob must be in [0, 1]");
  }
  if (!(mode_skew >= 0.0)) throw UsageError("synth: mode_skew must be >= 0");
  if (snippet_len == 0 || snippet_stride == 0) throw UsageError("synth: snippet length and stride must be >= 1");
  if (frames_per_video < snippet_len) throw UsageError("synth: frames_per_video must be >= snippet_len");
}

SynthConfig synth_preset(std::string_view name) {
  SynthConfig c;
  if (name == "default") return c;
  if (name == "small") {
    c.d = 32;
    c.num_modes = 8;
    c.train_count = 1000;
    c.videos = 4;
    c.frames_per_video = 240;
    return c;
  }
  throw UsageError("unknown synth preset '" + std::string(name) + "' (expected default|small)");
}

SynthCorpus generate_synthetic(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus{config, FeatureMatrix(config.d), {}};
  const std::size_t d = config.d;
  const double noise_scale = config.mode_spread / std::sqrt(static_cast<double>(d));

  Rng mode_rng = Rng::substream(config.seed, 0);
  std::vector<std::vector<double>> modes;
  std::vector<double> cumulative;
  double total = 0.0;
  for (std::uint32_t c = 0; c < config.num_modes; ++c) {
    modes.push_back(unit(gaussian(mode_rng, d, 1.0)));
    total += 1.0 / std::pow(c + 1.0, config.mode_skew);
    cumulative.push_back(total);
  }

  Rng train_rng = Rng::substream(config.seed, 1);
  corpus.train.reserve_rows(config.train_count);
  std::vector<double> x(d);
  for (std::uint32_t i = 0; i < config.train_count; ++i) {
    const auto& mu = modes[pick_mode(train_rng, cumulative)];
    for (std::size_t k = 0; k < d; ++k) x[k] = mu[k] + noise_scale * train_rng.normal();
    corpus.train.append(to_sphere(x));
  }

  const double rho = config.temporal_correlation;
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (std::uint32_t v = 0; v < config.videos; ++v) {
    Rng rng = Rng::substream(config.seed, 2 + v);
    SynthVideo video;
    char id[32];
    std::snprintf(id, sizeof id, "test_%03u", v);
    video.id = id;
    video.frame_count = config.frames_per_video;
    video.features = FeatureMatrix(config.d);

    const auto anomalous = static_cast<std::uint64_t>(
        std::llround(config.anomaly_rate * static_cast<double>(config.frames_per_video)));
    const std::uint64_t seg_start =
        anomalous == 0 ? 0 : rng.below(config.frames_per_video - anomalous + 1);
    const std::uint64_t seg_end = seg_start + anomalous;
    video.labels.assign(config.frames_per_video, 0);
    for (std::uint64_t t = seg_start; t < seg_end; ++t) video.labels[t] = 1;
    const std::vector<double> direction = unit(gaussian(rng, d, 1.0));

    std::vector<double> noise = gaussian(rng, d, 1.0);
    std::uint32_t mode = pick_mode(rng, cumulative);
    std::vector<std::uint64_t> starts;
    for (std::uint64_t s = 0; s + config.snippet_len <= config.frames_per_video; s += config.snippet_stride) {
      starts.push_back(s);
    }
    if (starts.back() + config.snippet_len < config.frames_per_video) {
      starts.push_back(config.frames_per_video - config.snippet_len);
    }
    for (std::uint64_t start : starts) {
      if (rng.uniform() < config.mode_switch_prob) mode = pick_mode(rng, cumulative);
      for (double& e : noise) e = rho * e + innovation * rng.normal();
      const std::uint64_t center = start + config.snippet_len / 2;
      const bool displaced = center >= seg_start && center < seg_end;
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = modes[mode][k] + noise_scale * noise[k] +
               (displaced ? config.anomaly_shift * direction[k] : 0.0);
      }
      video.features.append(to_sphere(x));
      video.spans.push_back(FrameSpan{start, config.snippet_len});
    }
    corpus.test.push_back(std::move(video));
  }
  return corpus;
}

std::filesystem::path write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create output directory (" + ec.message() + ")");

  DatasetManifest manifest;
  manifest.dataset = "synthetic";
  manifest.feature_dim = corpus.config.d;
  save_features(FeatureFile{corpus.train, std::nullopt}, dir / "train.fvs");
  manifest.train.push_back(VideoEntry{"train", dir / "train.fvs", std::nullopt, std::nullopt});
  for (const SynthVideo& v : corpus.test) {
    const auto features = dir / (v.id + ".fvs");
    const auto labels = dir / (v.id + ".labels.csv");
    save_features(FeatureFile{v.features, v.spans}, features);
    save_labels(v.labels, labels);
    manifest.test.push_back(VideoEntry{v.id, features, v.frame_count, labels});
  }
  const auto path = dir / "manifest.json";
  save_manifest(manifest, path);
  return path;
}

}  // namespace llsh
