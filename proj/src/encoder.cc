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

#include "llsh/encoder.h"

#include <cmath>
#include <limits>
#include <string>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"
#include "llsh/common/rng.h"
#include "llsh/simd/kernels.h"

namespace llsh {
namespace {

constexpr std::string_view kEncoderMagic = "LLSHENC1";

std::size_t weight_count(const EncoderConfig& c) {
  return std::size_t{c.num_tables} * c.code_len * c.feature_dim;
}

}  // namespace

void EncoderConfig::validate() const {
  if (feature_dim == 0) throw UsageError("encoder: feature dimension d must be >= 1");
  if (code_len == 0) throw UsageError("encoder: code length r must be >= 1");
  if (num_tables == 0) throw UsageError("encoder: number of tables b must be >= 1");
}

ConcatCode::ConcatCode(std::uint32_t code_len, std::uint32_t num_tables)
    : code_len_(code_len),
      num_tables_(num_tables),
      values_(std::size_t{code_len} * num_tables, 0.0f) {}

HashCode ConcatCode::layer_code(std::uint32_t j) const {
  auto view = layer(j);
  return HashCode(view.begin(), view.end());
}

BinaryKey::BinaryKey(std::uint32_t num_bits, std::vector<std::uint8_t> packed)
    : num_bits_(num_bits), packed_(std::move(packed)) {
  if (packed_.size() != packed_size(num_bits_)) {
    throw DataError("binary key: " + std::to_string(packed_.size()) + " bytes cannot hold " +
                    std::to_string(num_bits_) + " bits");
  }
  if (num_bits_ % 8 != 0) {
    const auto unused = static_cast<std::uint8_t>(0xffu << (num_bits_ % 8));
    if (packed_.back() & unused) throw DataError("binary key: nonzero padding bits");
  }
}

BinaryKey BinaryKey::from_bits(std::span<const bool> bits) {
  std::vector<std::uint8_t> packed(packed_size(static_cast<std::uint32_t>(bits.size())), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return BinaryKey(static_cast<std::uint32_t>(bits.size()), std::move(packed));
}

std::vector<bool> BinaryKey::bits() const {
  std::vector<bool> out(num_bits_);
  for (std::uint32_t i = 0; i < num_bits_; ++i) out[i] = bit(i);
  return out;
}

std::size_t BinaryKey::Hash::operator()(const BinaryKey& key) const {
  return static_cast<std::size_t>(fnv1a64(key.bytes()) ^ key.num_bits());
}

BinaryKey binarize(std::span<const float> code) {
  std::vector<std::uint8_t> packed(BinaryKey::packed_size(static_cast<std::uint32_t>(code.size())),
                                   0);
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i] >= 0.5f) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return BinaryKey(static_cast<std::uint32_t>(code.size()), std::move(packed));
}

float code_value(double preactivation) {
  if (!std::isfinite(preactivation)) {
    throw NumericError("encoder: non-finite pre-activation");
  }
  const double s = 1.0 / (1.0 + std::exp(-preactivation));
  auto v = static_cast<float>(s);
  if (preactivation >= 0.0) {
    if (v >= 1.0f) v = std::nextafter(1.0f, 0.0f);
  } else {
    if (v >= 0.5f) v = std::nextafter(0.5f, 0.0f);
    if (v < std::numeric_limits<float>::min()) v = std::numeric_limits<float>::min();
  }
  return v;
}

HashEncoder::HashEncoder(const EncoderConfig& config, std::vector<float> weights)
    : config_(config), weights_(std::move(weights)) {
  config_.validate();
  if (weights_.size() != weight_count(config_)) {
    throw DataError("encoder: expected " + std::to_string(weight_count(config_)) +
                    " weights for b*r*d, got " + std::to_string(weights_.size()));
  }
}

HashEncoder HashEncoder::random(const EncoderConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t d = config.feature_dim;
  std::vector<float> weights(weight_count(config));
  std::vector<double> row(d);
  for (std::size_t offset = 0; offset < weights.size(); offset += d) {
    double norm2 = 0.0;
    for (auto& v : row) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < d; ++k) weights[offset + k] = static_cast<float>(row[k] * inv);
  }
  return HashEncoder(config, std::move(weights));
}

std::span<const float> HashEncoder::layer_weights(std::uint32_t j) const {
  const std::size_t layer = std::size_t{config_.code_len} * config_.feature_dim;
  return weights().subspan(j * layer, layer);
}

std::span<const float> HashEncoder::row(std::uint32_t j, std::uint32_t i) const {
  const std::size_t d = config_.feature_dim;
  return weights().subspan((std::size_t{j} * config_.code_len + i) * d, d);
}

double HashEncoder::input_scale(std::span<const float> x) const {
  if (x.size() != config_.feature_dim) {
    throw DataError("encoder: feature has dimension " + std::to_string(x.size()) +
                    ", encoder expects " + std::to_string(config_.feature_dim));
  }
  if (!config_.normalize_input) return 1.0;
  const double norm2 = simd::dot(x, x);
  if (!(norm2 > 0.0)) {
    throw DataError("encoder: cannot normalize a zero (or non-finite) feature vector");
  }
  return 1.0 / std::sqrt(norm2);
}

HashCode HashEncoder::forward_layer(std::uint32_t j, std::span<const float> x) const {
  if (j >= config_.num_tables) {
    throw UsageError("encoder: layer " + std::to_string(j) + " out of range (b=" +
                     std::to_string(config_.num_tables) + ")");
  }
  const double scale = input_scale(x);
  HashCode code(config_.code_len);
  for (std::uint32_t i = 0; i < config_.code_len; ++i) {
    code[i] = code_value(simd::dot(row(j, i), x) * scale);
  }
  return code;
}

ConcatCode HashEncoder::encode(std::span<const float> x) const {
  ConcatCode out(config_.code_len, config_.num_tables);
  encode_into(x, out.values());
  return out;
}

void HashEncoder::encode_into(std::span<const float> x, std::span<float> out) const {
  const double scale = input_scale(x);
  const std::size_t d = config_.feature_dim;
  const std::size_t rows = config_.concat_len();
  if (out.size() != rows) throw UsageError("encoder: output buffer has wrong length");
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < rows; ++i) {
    out[i] = code_value(k.dot_f32(weights_.data() + i * d, x.data(), d) * scale);
  }
}

std::vector<std::uint8_t> HashEncoder::serialize() const {
  ByteWriter w;
  w.put_magic(kEncoderMagic);
  w.put_u32(config_.feature_dim);
  w.put_u32(config_.code_len);
  w.put_u32(config_.num_tables);
  w.put_u8(config_.normalize_input ? 1 : 0);
  w.put_u64(config_.seed);
  w.put_f32s(weights_);
  return w.release();
}

HashEncoder HashEncoder::deserialize(std::span<const std::uint8_t> bytes, std::string_view source) {
  ByteReader r(bytes, std::string(source));
  r.expect_magic(kEncoderMagic);
  EncoderConfig config;
  config.feature_dim = r.get_u32("d");
  config.code_len = r.get_u32("r");
  config.num_tables = r.get_u32("b");
  const std::uint8_t normalize = r.get_u8("normalize_input");
  if (normalize > 1) r.fail("normalize_input flag must be 0 or 1");
  config.normalize_input = normalize == 1;
  config.seed = r.get_u64("seed");
  if (config.feature_dim == 0 || config.code_len == 0 || config.num_tables == 0) {
    r.fail("header declares a zero dimension");
  }
  const std::uint64_t count = std::uint64_t{config.num_tables} * config.code_len * config.feature_dim;
  if (count > r.remaining() / 4) {
    r.fail("payload shorter than header dimensions b*r*d=" + std::to_string(count) +
           " require");
  }
  std::vector<float> weights(count);
  r.get_f32s(weights, "weights");
  r.expect_end();
  return HashEncoder(config, std::move(weights));
}

std::uint64_t HashEncoder::fingerprint() const { return fnv1a64(serialize()); }

void save_encoder(const HashEncoder& encoder, const std::filesystem::path& path) {
  write_file(path, encoder.serialize());
}

HashEncoder load_encoder(const std::filesystem::path& path) {
  return HashEncoder::deserialize(read_file(path), path.string());
}

}  // namespace llsh
