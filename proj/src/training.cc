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

#include "llsh/training.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "llsh/common/error.h"
#include "llsh/common/parallel.h"
#include "llsh/simd/kernels.h"

namespace llsh {
namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("training: non-finite ") + what);
}

double input_scale(const EncoderConfig& config, std::span<const float> x) {
  if (x.size() != config.feature_dim) {
    throw DataError("training: feature has dimension " + std::to_string(x.size()) +
                    ", encoder expects " + std::to_string(config.feature_dim));
  }
  if (!config.normalize_input) return 1.0;
  const double norm2 = simd::dot(x, x);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw DataError("training: cannot normalize a zero or non-finite feature vector");
  }
  return 1.0 / std::sqrt(norm2);
}

// Per-sample pieces of the gradient: dW row i = delta[i] * scaled_input.
struct SampleGradient {
  double loss = 0.0;
  std::vector<double> delta;         // dL/d(pre-activation), b*r entries
  std::vector<double> scaled_input;  // the layer input x / |x| (or x)
};

// -log softmax(logits)[0]; log1p form when the first logit is the largest.
double neg_log_softmax0(std::span<const double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double rest = 0.0;
  if (max_logit == logits[0]) {
    for (std::size_t i = 1; i < logits.size(); ++i) rest += std::exp(logits[i] - logits[0]);
    return std::log1p(rest);
  }
  for (double l : logits) rest += std::exp(l - max_logit);
  return std::log(rest) + max_logit - logits[0];
}

SampleGradient sample_gradient(const EncoderParams& params, std::span<const float> x_q,
                               std::span<const double> z_pos, const CodeQueue& queue,
                               double tau) {
  const std::size_t width = params.config.concat_len();
  if (z_pos.size() != width) throw DataError("training: positive code has the wrong length");
  if (!queue.empty() && queue.code_len() != width) {
    throw DataError("training: queue code length does not match the encoder");
  }

  SampleGradient out;
  const double scale = input_scale(params.config, x_q);
  out.scaled_input.resize(x_q.size());
  for (std::size_t k = 0; k < x_q.size(); ++k) out.scaled_input[k] = x_q[k] * scale;

  std::vector<double> h(width);
  params.forward(x_q, h);
  double norm2 = 0.0;
  for (double v : h) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  require_finite(norm, "code norm");
  std::vector<double> z(width);
  for (std::size_t i = 0; i < width; ++i) z[i] = h[i] / norm;

  const std::vector<double> pos = l2_normalized(z_pos);

  // Logits and softmax over {positive, queue...}, max-shifted.
  std::vector<double> logits(queue.size() + 1);
  logits[0] = simd::dot(std::span<const double>(z), std::span<const double>(pos)) / tau;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    logits[i + 1] = simd::dot(std::span<const double>(z), queue.entry(i)) / tau;
  }
  out.loss = neg_log_softmax0(logits);
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    denom += l;
  }
  require_finite(out.loss, "loss");

  // dL/dz = (sum_i p_i v_i - positive) / tau
  std::vector<double> grad_z(width, 0.0);
  simd::axpy((logits[0] / denom - 1.0) / tau, pos, grad_z);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    simd::axpy(logits[i + 1] / denom / tau, queue.entry(i), grad_z);
  }
  // Through z = h / |h|: dL/dh = (g - z (z . g)) / |h|, then the sigmoid.
  const double radial = simd::dot(std::span<const double>(z), std::span<const double>(grad_z));
  out.delta.resize(width);
  for (std::size_t i = 0; i < width; ++i) {
    const double grad_h = (grad_z[i] - z[i] * radial) / norm;
    out.delta[i] = grad_h * h[i] * (1.0 - h[i]);
    require_finite(out.delta[i], "gradient");
  }
  return out;
}

// grad[row] = weight * sum_s delta_s[row] * input_s, summed in sample order.
void accumulate_gradient(std::span<const SampleGradient> samples, double weight, std::size_t d,
                         std::span<double> grad) {
  const std::size_t rows = grad.size() / d;
  parallel_for(rows, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t row = lo; row < hi; ++row) {
      auto out = grad.subspan(row * d, d);
      std::fill(out.begin(), out.end(), 0.0);
      for (const SampleGradient& s : samples) {
        simd::axpy(weight * s.delta[row], s.scaled_input, out);
      }
    }
  });
}

}  // namespace

void TrainConfig::validate() const {
  if (queue_len == 0) throw UsageError("train: queue length l must be >= 1");
  if (batch_size == 0) throw UsageError("train: batch size must be >= 1");
  if (!(temperature > 0.0)) throw UsageError("train: temperature must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("train: momentum must be in [0, 1)");
  if (!(learning_rate >= 0.0)) throw UsageError("train: learning rate must be >= 0");
  if (!(pair_jitter >= 0.0)) throw UsageError("train: pair jitter must be >= 0");
  if (max_offset < 0) throw UsageError("train: max offset must be >= 0");
}

EncoderParams EncoderParams::from_encoder(const HashEncoder& encoder) {
  auto w = encoder.weights();
  return EncoderParams{encoder.config(), std::vector<double>(w.begin(), w.end())};
}

HashEncoder EncoderParams::to_encoder() const {
  std::vector<float> w(weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<float>(weights[i]);
  return HashEncoder(config, std::move(w));
}

void EncoderParams::forward(std::span<const float> x, std::span<double> code) const {
  const double scale = input_scale(config, x);
  const std::size_t d = config.feature_dim;
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < code.size(); ++i) {
    code[i] = sigmoid(k.dot_f64_f32(weights.data() + i * d, x.data(), d) * scale);
  }
}

std::vector<double> l2_normalized(std::span<const double> v) {
  const double norm = std::sqrt(simd::dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericError("training: cannot normalize a zero or non-finite code");
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

CodeQueue::CodeQueue(std::size_t capacity, std::size_t code_len)
    : capacity_(capacity), code_len_(code_len), storage_(capacity * code_len) {
  if (capacity == 0) throw UsageError("queue: capacity must be >= 1");
}

void CodeQueue::push(std::span<const double> code) {
  if (code.size() != code_len_) throw DataError("queue: code has the wrong length");
  const std::vector<double> unit = l2_normalized(code);
  std::size_t slot;
  if (size_ < capacity_) {
    slot = (head_ + size_) % capacity_;
    ++size_;
  } else {
    slot = head_;
    head_ = (head_ + 1) % capacity_;
  }
  std::copy(unit.begin(), unit.end(), storage_.begin() + slot * code_len_);
}

std::span<const double> CodeQueue::entry(std::size_t i) const {
  const std::size_t slot = (head_ + i) % capacity_;
  return std::span<const double>(storage_).subspan(slot * code_len_, code_len_);
}

PairSampler PairSampler::jittered(FeatureMatrix features, double jitter) {
  if (features.rows() == 0) throw DataError("pair sampler: empty feature source");
  PairSampler s;
  s.jitter_ = jitter;
  s.dim_ = features.dim();
  s.total_ = features.rows();
  s.sequences_.push_back(TimedSequence{std::move(features), {}});
  s.offsets_ = {0, s.total_};
  return s;
}

PairSampler PairSampler::temporal(std::vector<TimedSequence> sequences, std::int64_t max_offset) {
  PairSampler s;
  s.temporal_ = true;
  s.max_offset_ = max_offset;
  s.offsets_.push_back(0);
  for (auto& seq : sequences) {
    if (seq.features.rows() == 0) continue;
    if (seq.start_frames.size() != seq.features.rows()) {
      throw DataError("pair sampler: sequence needs one start frame per feature");
    }
    if (!std::is_sorted(seq.start_frames.begin(), seq.start_frames.end())) {
      throw DataError("pair sampler: start frames must be sorted");
    }
    if (s.dim_ == 0) s.dim_ = seq.features.dim();
    if (seq.features.dim() != s.dim_) throw DataError("pair sampler: inconsistent dimensions");
    s.total_ += seq.features.rows();
    s.offsets_.push_back(s.total_);
    s.sequences_.push_back(std::move(seq));
  }
  if (s.total_ == 0) throw DataError("pair sampler: empty feature source");
  return s;
}

FeaturePair PairSampler::sample(Rng& rng) const {
  const std::size_t global = rng.below(total_);
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  const std::size_t seq_index = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  const TimedSequence& seq = sequences_[seq_index];
  const std::size_t i = global - offsets_[seq_index];
  auto query = seq.features.row(i);

  FeaturePair pair;
  pair.query.assign(query.begin(), query.end());
  if (!temporal_) {
    pair.key = pair.query;
    if (jitter_ > 0.0) {
      double norm2 = 0.0;
      for (float v : query) norm2 += static_cast<double>(v) * v;
      const double sd = jitter_ * std::sqrt(norm2 / static_cast<double>(dim_));
      for (float& v : pair.key) v = static_cast<float>(v + sd * rng.normal());
    }
    return pair;
  }

  const auto& starts = seq.start_frames;
  const std::int64_t offset = rng.uniform_int(-max_offset_, max_offset_);
  const auto lo = static_cast<std::int64_t>(starts.front());
  const auto hi = static_cast<std::int64_t>(starts.back());
  const std::int64_t target = std::clamp(static_cast<std::int64_t>(starts[i]) + offset, lo, hi);
  auto pos = std::lower_bound(starts.begin(), starts.end(), static_cast<std::uint64_t>(target));
  std::size_t k = static_cast<std::size_t>(pos - starts.begin());
  if (k == starts.size()) k = starts.size() - 1;
  if (k > 0 && static_cast<std::int64_t>(starts[k]) - target >=
                   target - static_cast<std::int64_t>(starts[k - 1])) {
    --k;
  }
  auto key = seq.features.row(k);
  pair.key.assign(key.begin(), key.end());
  return pair;
}

std::vector<FeaturePair> sample_pairs(const PairSampler& sampler, std::size_t count,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeaturePair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pairs.push_back(sampler.sample(rng));
  return pairs;
}

double infonce(std::span<const double> z_q, std::span<const double> z_pos, const CodeQueue& queue,
               double tau) {
  if (!(tau > 0.0)) throw UsageError("infonce: temperature must be > 0");
  if (z_q.size() != z_pos.size()) throw DataError("infonce: code lengths differ");
  if (!queue.empty() && queue.code_len() != z_q.size()) {
    throw DataError("infonce: queue code length differs");
  }
  const std::vector<double> q = l2_normalized(z_q);
  const std::vector<double> p = l2_normalized(z_pos);
  std::vector<double> logits(queue.size() + 1);
  logits[0] = simd::dot(std::span<const double>(q), std::span<const double>(p)) / tau;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    logits[i + 1] = simd::dot(std::span<const double>(q), queue.entry(i)) / tau;
  }
  const double loss = neg_log_softmax0(logits);
  require_finite(loss, "loss");
  return loss;
}

LossGradient backward(const EncoderParams& encoder, std::span<const float> x_q,
                      std::span<const double> z_pos, const CodeQueue& queue, double tau) {
  if (!(tau > 0.0)) throw UsageError("backward: temperature must be > 0");
  SampleGradient s = sample_gradient(encoder, x_q, z_pos, queue, tau);
  LossGradient out{s.loss, std::vector<double>(encoder.weights.size())};
  accumulate_gradient(std::span<const SampleGradient>(&s, 1), 1.0, encoder.config.feature_dim,
                      out.grad);
  return out;
}

void sgd_step(EncoderParams& params, std::span<const double> grad, double learning_rate) {
  if (grad.size() != params.weights.size()) throw DataError("sgd_step: gradient shape mismatch");
  simd::axpy(-learning_rate, grad, params.weights);
}

void momentum_update(EncoderParams& key, const EncoderParams& query, double m) {
  if (!(key.config.feature_dim == query.config.feature_dim &&
        key.config.code_len == query.config.code_len &&
        key.config.num_tables == query.config.num_tables)) {
    throw DataError("momentum_update: encoder shapes differ");
  }
  for (std::size_t i = 0; i < key.weights.size(); ++i) {
    key.weights[i] = m * key.weights[i] + (1.0 - m) * query.weights[i];
  }
}

void momentum_update(HashEncoder& key, const HashEncoder& query, double m) {
  if (key.weights().size() != query.weights().size() ||
      key.feature_dim() != query.feature_dim() || key.code_len() != query.code_len()) {
    throw DataError("momentum_update: encoder shapes differ");
  }
  auto kw = key.mutable_weights();
  auto qw = query.weights();
  for (std::size_t i = 0; i < kw.size(); ++i) {
    kw[i] = static_cast<float>(m * static_cast<double>(kw[i]) +
                               (1.0 - m) * static_cast<double>(qw[i]));
  }
}

TrainResult train(const PairSampler& sampler, const EncoderConfig& encoder_config,
                  const TrainConfig& config, const StepObserver& observer) {
  encoder_config.validate();
  config.validate();
  if (sampler.dim() != encoder_config.feature_dim) {
    throw DataError("train: features have d=" + std::to_string(sampler.dim()) +
                    ", encoder expects d=" + std::to_string(encoder_config.feature_dim));
  }
  const HashEncoder initial = HashEncoder::random(encoder_config);
  TrainResult result{initial, EncoderParams::from_encoder(initial),
                     EncoderParams::from_encoder(initial), {}};
  EncoderParams& query = result.query;
  EncoderParams& key = result.key;

  const std::size_t width = encoder_config.concat_len();
  const std::size_t batch = config.batch_size;
  CodeQueue queue(config.queue_len, width);
  Rng rng = Rng::substream(config.seed, 1);
  std::vector<double> grad(query.weights.size());
  std::vector<std::vector<double>> key_codes(batch, std::vector<double>(width));
  std::vector<SampleGradient> samples(batch);
  result.losses.reserve(config.iterations);

  for (std::uint32_t step = 0; step < config.iterations; ++step) {
    std::vector<FeaturePair> pairs;
    pairs.reserve(batch);
    for (std::size_t s = 0; s < batch; ++s) pairs.push_back(sampler.sample(rng));

    parallel_for(batch, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s) {
        key.forward(pairs[s].key, key_codes[s]);
        samples[s] = sample_gradient(query, pairs[s].query, key_codes[s], queue,
                                     config.temperature);
      }
    });

    double loss = 0.0;
    for (const SampleGradient& s : samples) loss += s.loss;
    loss /= static_cast<double>(batch);
    accumulate_gradient(samples, 1.0 / static_cast<double>(batch), encoder_config.feature_dim,
                        grad);

    sgd_step(query, grad, config.learning_rate);
    momentum_update(key, query, config.momentum);
    for (const auto& code : key_codes) queue.push(code);

    result.losses.push_back(loss);
    if (observer) observer(step, loss, query, key);
  }
  result.encoder = query.to_encoder();
  return result;
}

double mean_positive_similarity(const HashEncoder& encoder, std::span<const FeaturePair> pairs,
                                CodeCentering centering) {
  if (pairs.empty()) throw DataError("mean_positive_similarity: no pairs");
  const double offset = centering == CodeCentering::kThreshold ? 0.5 : 0.0;
  std::vector<double> sims(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const ConcatCode a = encoder.encode(pairs[i].query);
      const ConcatCode b = encoder.encode(pairs[i].key);
      double ab = 0.0, aa = 0.0, bb = 0.0;
      for (std::size_t k = 0; k < a.values().size(); ++k) {
        const double u = a.values()[k] - offset;
        const double v = b.values()[k] - offset;
        ab += u * v;
        aa += u * u;
        bb += v * v;
      }
      sims[i] = aa > 0.0 && bb > 0.0 ? ab / std::sqrt(aa * bb) : 0.0;
    }
  });
  double total = 0.0;
  for (double s : sims) total += s;
  return total / static_cast<double>(sims.size());
}

}  // namespace llsh
