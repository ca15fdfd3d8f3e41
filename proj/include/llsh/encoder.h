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
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace llsh {

struct EncoderConfig {
  std::uint32_t feature_dim = 0;  // d
  std::uint32_t code_len = 32;    // r, bits per hash code
  std::uint32_t num_tables = 8;   // b, parallel hash layers
  bool normalize_input = true;
  std::uint64_t seed = 0;

  // Throws UsageError unless d, r, b are all positive.
  void validate() const;
  std::size_t concat_len() const { return std::size_t{code_len} * num_tables; }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// r-dimensional sigmoid output of one hash layer. Entries lie in (0, 1).
using HashCode = std::vector<float>;

// Concatenation of the b per-layer codes, in layer order.
class ConcatCode {
 public:
  ConcatCode(std::uint32_t code_len, std::uint32_t num_tables);

  std::uint32_t code_len() const { return code_len_; }
  std::uint32_t num_tables() const { return num_tables_; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }
  std::span<const float> layer(std::uint32_t j) const {
    return values().subspan(std::size_t{j} * code_len_, code_len_);
  }
  HashCode layer_code(std::uint32_t j) const;

 private:
  std::uint32_t code_len_;
  std::uint32_t num_tables_;
  std::vector<float> values_;
};

// r-bit binarization of a hash code, packed LSB-first: bit i lives in byte
// i / 8 at position i % 8. Unused high bits of the last byte are zero.
class BinaryKey {
 public:
  BinaryKey() = default;
  BinaryKey(std::uint32_t num_bits, std::vector<std::uint8_t> packed);

  static BinaryKey from_bits(std::span<const bool> bits);

  std::uint32_t num_bits() const { return num_bits_; }
  bool bit(std::uint32_t i) const { return (packed_[i / 8] >> (i % 8)) & 1u; }
  std::vector<bool> bits() const;
  std::span<const std::uint8_t> bytes() const { return packed_; }

  static std::size_t packed_size(std::uint32_t num_bits) { return (num_bits + 7) / 8; }

  friend bool operator==(const BinaryKey&, const BinaryKey&) = default;

  struct Hash {
    std::size_t operator()(const BinaryKey& key) const;
  };

 private:
  std::uint32_t num_bits_ = 0;
  std::vector<std::uint8_t> packed_;
};

// bit i = 1 iff code[i] >= 0.5.
BinaryKey binarize(std::span<const float> code);

// Maps a pre-activation to its stored 32-bit code value. The result stays
// strictly inside (0, 1) and keeps the exact sign test: it is >= 0.5 iff
// preactivation >= 0, even when rounding to float would land on 0.5 or 1.
float code_value(double preactivation);

// b bias-free linear layers of shape r x d, each followed by a sigmoid.
// Weights are stored layer-major, row-major: row i of layer j starts at
// (j * r + i) * d.
class HashEncoder {
 public:
  HashEncoder(const EncoderConfig& config, std::vector<float> weights);

  // I.i.d. standard normal rows from the seeded generator, each rescaled to
  // unit Euclidean norm.
  static HashEncoder random(const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }
  std::uint32_t feature_dim() const { return config_.feature_dim; }
  std::uint32_t code_len() const { return config_.code_len; }
  std::uint32_t num_tables() const { return config_.num_tables; }

  std::span<const float> weights() const { return weights_; }
  std::span<float> mutable_weights() { return weights_; }
  std::span<const float> layer_weights(std::uint32_t j) const;
  std::span<const float> row(std::uint32_t j, std::uint32_t i) const;

  // 1/|x| when inputs are normalized, 1 otherwise. Throws DataError on a
  // dimension mismatch or a zero vector that would need normalizing.
  double input_scale(std::span<const float> x) const;

  // Layer j (0-based) applied to x.
  HashCode forward_layer(std::uint32_t j, std::span<const float> x) const;
  ConcatCode encode(std::span<const float> x) const;
  // Writes the b*r concatenated code into out.
  void encode_into(std::span<const float> x, std::span<float> out) const;

  std::vector<std::uint8_t> serialize() const;
  static HashEncoder deserialize(std::span<const std::uint8_t> bytes, std::string_view source);
  // FNV-1a digest of serialize().
  std::uint64_t fingerprint() const;

  friend bool operator==(const HashEncoder&, const HashEncoder&) = default;

 private:
  EncoderConfig config_;
  std::vector<float> weights_;
};

void save_encoder(const HashEncoder& encoder, const std::filesystem::path& path);
HashEncoder load_encoder(const std::filesystem::path& path);

}  // namespace llsh
