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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "llsh/common/rng.h"
#include "llsh/encoder.h"
#include "llsh/features.h"

namespace llsh {

struct TrainConfig {
  std::uint32_t queue_len = 1024;  // l
  std::uint32_t batch_size = 32;
  double temperature = 0.2;     // tau
  double momentum = 0.999;      // m
  double learning_rate = 0.001;
  std::uint32_t iterations = 60;
  // Synthetic positives: x_k = x_q + noise whose expected norm is
  // pair_jitter * |x_q|.
  double pair_jitter = 0.1;
  // Timestamped positives: offset drawn uniformly from [-max_offset, max_offset] frames.
  std::int64_t max_offset = 150;
  std::uint64_t seed = 0;

  void validate() const;
};

// Double-precision working copy of an encoder's weights. Training runs
// entirely on these; the f32 HashEncoder is materialized at the end.
struct EncoderParams {
  EncoderConfig config;
  std::vector<double> weights;  // same layout as HashEncoder::weights()

  static EncoderParams from_encoder(const HashEncoder& encoder);
  HashEncoder to_encoder() const;

  // Unnormalized concatenated sigmoid code, b*r entries, computed in double.
  void forward(std::span<const float> x, std::span<double> code) const;
};

// Returns v / |v|. Throws NumericError on a zero or non-finite norm.
std::vector<double> l2_normalized(std::span<const double> v);

// Fixed-capacity FIFO of L2-normalized concatenated key codes.
class CodeQueue {
 public:
  CodeQueue(std::size_t capacity, std::size_t code_len);

  // Normalizes code and appends it, evicting the oldest entry when full.
  void push(std::span<const double> code);

  std::size_t capacity() const { return capacity_; }
  std::size_t code_len() const { return code_len_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  // i = 0 is the oldest entry.
  std::span<const double> entry(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t code_len_;
  std::size_t head_ = 0;  // slot of the oldest entry
  std::size_t size_ = 0;
  std::vector<double> storage_;
};

struct FeaturePair {
  std::vector<float> query;
  std::vector<float> key;
};

// Features of one video ordered by start frame.
struct TimedSequence {
  FeatureMatrix features;
  std::vector<std::uint64_t> start_frames;
};

class PairSampler {
 public:
  // Positive = query plus isotropic Gaussian noise.
  static PairSampler jittered(FeatureMatrix features, double jitter);
  // Positive = the feature of the same video whose start frame is nearest
  // t + dt, dt uniform on [-max_offset, max_offset], clamped to the video.
  static PairSampler temporal(std::vector<TimedSequence> sequences, std::int64_t max_offset);

  FeaturePair sample(Rng& rng) const;
  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return total_; }

 private:
  PairSampler() = default;

  bool temporal_ = false;
  double jitter_ = 0.0;
  std::int64_t max_offset_ = 0;
  std::uint32_t dim_ = 0;
  std::size_t total_ = 0;
  std::vector<TimedSequence> sequences_;
  std::vector<std::size_t> offsets_;  // cumulative sequence sizes
};

std::vector<FeaturePair> sample_pairs(const PairSampler& sampler, std::size_t count,
                                      std::uint64_t seed);

// -log softmax of the positive logit over {positive} + queue entries, with
// logits z_q . z / tau on L2-normalized codes.
double infonce(std::span<const double> z_q, std::span<const double> z_pos, const CodeQueue& queue,
               double tau);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;  // dL/dW, HashEncoder weight layout
};

// Analytic gradient of infonce(normalize(encoder(x_q)), z_pos, queue, tau)
// with respect to every weight.
LossGradient backward(const EncoderParams& encoder, std::span<const float> x_q,
                      std::span<const double> z_pos, const CodeQueue& queue, double tau);

void sgd_step(EncoderParams& params, std::span<const double> grad, double learning_rate);

// key <- m * key + (1 - m) * query, element-wise.
void momentum_update(EncoderParams& key, const EncoderParams& query, double m);
void momentum_update(HashEncoder& key, const HashEncoder& query, double m);

struct TrainResult {
  HashEncoder encoder;  // query side, rounded to f32
  EncoderParams query;
  EncoderParams key;
  std::vector<double> losses;  // mean batch loss per step
};

using StepObserver = std::function<void(std::uint32_t step, double loss,
                                        const EncoderParams& query, const EncoderParams& key)>;

// Both encoders start from HashEncoder::random(encoder_config). Each step
// encodes a batch of pairs, takes the mean InfoNCE loss against the current
// queue, applies SGD to the query encoder only, momentum-updates the key
// encoder, then enqueues the batch's key codes.
TrainResult train(const PairSampler& sampler, const EncoderConfig& encoder_config,
                  const TrainConfig& config, const StepObserver& observer = {});

enum class CodeCentering {
  kNone,       // raw sigmoid codes
  kThreshold,  // codes minus 0.5, the binarization threshold
};

// Mean cosine similarity of concatenated codes over positive pairs. With
// kThreshold the constant 0.5 shared by every code is removed first, leaving
// the part whose signs form the bucket keys.
double mean_positive_similarity(const HashEncoder& encoder, std::span<const FeaturePair> pairs,
                                CodeCentering centering = CodeCentering::kThreshold);

}  // namespace llsh
