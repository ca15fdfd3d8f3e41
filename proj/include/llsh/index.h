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
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "llsh/encoder.h"
#include "llsh/features.h"

namespace llsh {

enum class IndexVariant : std::uint8_t {
  kFull = 0,   // every stored code per bucket
  kLight = 1,  // mean code and population per bucket
};

std::string_view variant_name(IndexVariant v);
IndexVariant parse_variant(std::string_view name);

// One key's worth of stored codes. In the full variant payload holds count
// codes back to back (count * r floats, insertion order); in the light variant
// it holds the r-float mean of the codes inserted under this key.
struct Bucket {
  BinaryKey key;
  std::uint64_t count = 0;
  std::vector<float> payload;

  std::span<const float> code(std::size_t i, std::uint32_t r) const {
    return std::span<const float>(payload).subspan(i * r, r);
  }

  friend bool operator==(const Bucket&, const Bucket&) = default;
};

// Key -> bucket map. Buckets are kept in first-insertion order so that
// serialization is deterministic.
class HashTable {
 public:
  const Bucket* find(const BinaryKey& key) const;
  // Existing bucket for key, or a new empty one.
  Bucket& find_or_insert(const BinaryKey& key);
  // Appends a bucket whose key must not already be present.
  void append(Bucket bucket);

  std::span<const Bucket> buckets() const { return buckets_; }
  std::span<Bucket> mutable_buckets() { return buckets_; }
  std::size_t size() const { return buckets_.size(); }

  friend bool operator==(const HashTable& a, const HashTable& b) { return a.buckets_ == b.buckets_; }

 private:
  std::vector<Bucket> buckets_;
  std::unordered_map<BinaryKey, std::size_t, BinaryKey::Hash> slots_;
};

class HashIndex {
 public:
  HashIndex(IndexVariant variant, std::uint32_t code_len, std::uint32_t num_tables,
            std::uint64_t encoder_fingerprint);

  IndexVariant variant() const { return variant_; }
  std::uint32_t code_len() const { return code_len_; }
  std::uint32_t num_tables() const { return static_cast<std::uint32_t>(tables_.size()); }
  std::uint64_t total_count() const { return total_count_; }
  std::uint64_t encoder_fingerprint() const { return encoder_fingerprint_; }

  const HashTable& table(std::uint32_t j) const { return tables_.at(j); }
  HashTable& mutable_table(std::uint32_t j) { return tables_.at(j); }
  void set_total_count(std::uint64_t n) { total_count_ = n; }

  std::vector<std::uint8_t> serialize() const;
  static HashIndex deserialize(std::span<const std::uint8_t> bytes, std::string_view source);

  friend bool operator==(const HashIndex&, const HashIndex&) = default;

 private:
  IndexVariant variant_;
  std::uint32_t code_len_;
  std::uint64_t total_count_ = 0;
  std::uint64_t encoder_fingerprint_;
  std::vector<HashTable> tables_;
};

// Encodes every feature (in parallel) and files each layer's code under its
// binarized key in the matching table.
HashIndex build_index(const HashEncoder& encoder, const FeatureMatrix& features,
                      IndexVariant variant);

// Full -> light: every bucket collapses to the mean of its codes.
HashIndex lighten(const HashIndex& full);

struct TableStats {
  std::size_t num_buckets = 0;
  std::uint64_t min_size = 0;
  std::uint64_t max_size = 0;
  double mean_size = 0.0;
  std::uint64_t total = 0;  // sum of bucket populations
};

struct IndexStats {
  IndexVariant variant;
  std::uint32_t code_len;
  std::uint64_t total_count;
  std::vector<TableStats> tables;
};

IndexStats index_stats(const HashIndex& index);

enum class FingerprintCheck {
  kIgnore,
  kWarn,    // report the mismatch on std::cerr and continue
  kStrict,  // refuse the index
};

void save_index(const HashIndex& index, const std::filesystem::path& path);
// When encoder is given, its fingerprint is compared with the one recorded at
// build time according to check.
HashIndex load_index(const std::filesystem::path& path, const HashEncoder* encoder = nullptr,
                     FingerprintCheck check = FingerprintCheck::kWarn);

}  // namespace llsh
