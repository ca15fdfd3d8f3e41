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

#include "llsh/index.h"

#include <algorithm>
#include <iostream>
#include <limits>
#include <string>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"
#include "llsh/common/parallel.h"

namespace llsh {
namespace {

constexpr std::string_view kIndexMagic = "LLSHIDX1";
constexpr std::size_t kEncodeBlockRows = 4096;

}  // namespace

std::string_view variant_name(IndexVariant v) {
  return v == IndexVariant::kFull ? "full" : "light";
}

IndexVariant parse_variant(std::string_view name) {
  if (name == "full") return IndexVariant::kFull;
  if (name == "light") return IndexVariant::kLight;
  throw UsageError("unknown index variant '" + std::string(name) + "' (expected full|light)");
}

const Bucket* HashTable::find(const BinaryKey& key) const {
  auto it = slots_.find(key);
  return it == slots_.end() ? nullptr : &buckets_[it->second];
}

Bucket& HashTable::find_or_insert(const BinaryKey& key) {
  auto [it, inserted] = slots_.try_emplace(key, buckets_.size());
  if (inserted) buckets_.push_back(Bucket{key, 0, {}});
  return buckets_[it->second];
}

void HashTable::append(Bucket bucket) {
  auto [it, inserted] = slots_.try_emplace(bucket.key, buckets_.size());
  if (!inserted) throw DataError("hash table: duplicate bucket key");
  buckets_.push_back(std::move(bucket));
}

HashIndex::HashIndex(IndexVariant variant, std::uint32_t code_len, std::uint32_t num_tables,
                     std::uint64_t encoder_fingerprint)
    : variant_(variant),
      code_len_(code_len),
      encoder_fingerprint_(encoder_fingerprint),
      tables_(num_tables) {
  if (code_len == 0 || num_tables == 0) throw DataError("index: r and b must be >= 1");
}

HashIndex build_index(const HashEncoder& encoder, const FeatureMatrix& features,
                      IndexVariant variant) {
  if (features.rows() == 0) throw DataError("build_index: no training features");
  if (features.dim() != encoder.feature_dim()) {
    throw DataError("build_index: features have d=" + std::to_string(features.dim()) +
                    ", encoder expects d=" + std::to_string(encoder.feature_dim()));
  }
  const std::uint32_t r = encoder.code_len();
  const std::uint32_t b = encoder.num_tables();
  const std::size_t width = encoder.config().concat_len();
  HashIndex index(variant, r, b, encoder.fingerprint());

  // Light variant: per-table running sums, parallel to the bucket vector.
  std::vector<std::vector<std::vector<double>>> sums(variant == IndexVariant::kLight ? b : 0);

  std::vector<float> block;
  for (std::size_t start = 0; start < features.rows(); start += kEncodeBlockRows) {
    const std::size_t rows = std::min(kEncodeBlockRows, features.rows() - start);
    block.assign(rows * width, 0.0f);
    parallel_for(rows, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        encoder.encode_into(features.row(start + i),
                            std::span<float>(block).subspan(i * width, width));
      }
    });

    for (std::size_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < b; ++j) {
        auto code = std::span<const float>(block).subspan(i * width + std::size_t{j} * r, r);
        HashTable& table = index.mutable_table(j);
        const std::size_t before = table.size();
        Bucket& bucket = table.find_or_insert(binarize(code));
        ++bucket.count;
        if (variant == IndexVariant::kFull) {
          bucket.payload.insert(bucket.payload.end(), code.begin(), code.end());
        } else {
          if (table.size() != before) sums[j].emplace_back(r, 0.0);
          const std::size_t slot = static_cast<std::size_t>(&bucket - table.buckets().data());
          auto& acc = sums[j][slot];
          for (std::uint32_t k = 0; k < r; ++k) acc[k] += code[k];
        }
      }
    }
  }

  if (variant == IndexVariant::kLight) {
    for (std::uint32_t j = 0; j < b; ++j) {
      auto buckets = index.mutable_table(j).mutable_buckets();
      for (std::size_t s = 0; s < buckets.size(); ++s) {
        buckets[s].payload.resize(r);
        const double n = static_cast<double>(buckets[s].count);
        for (std::uint32_t k = 0; k < r; ++k) {
          buckets[s].payload[k] = static_cast<float>(sums[j][s][k] / n);
        }
      }
    }
  }
  index.set_total_count(features.rows());
  return index;
}

HashIndex lighten(const HashIndex& full) {
  if (full.variant() != IndexVariant::kFull) {
    throw UsageError("lighten: index is already light");
  }
  const std::uint32_t r = full.code_len();
  HashIndex light(IndexVariant::kLight, r, full.num_tables(), full.encoder_fingerprint());
  std::vector<double> acc(r);
  for (std::uint32_t j = 0; j < full.num_tables(); ++j) {
    for (const Bucket& bucket : full.table(j).buckets()) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::uint64_t i = 0; i < bucket.count; ++i) {
        auto code = bucket.code(i, r);
        for (std::uint32_t k = 0; k < r; ++k) acc[k] += code[k];
      }
      Bucket mean{bucket.key, bucket.count, std::vector<float>(r)};
      const double n = static_cast<double>(bucket.count);
      for (std::uint32_t k = 0; k < r; ++k) mean.payload[k] = static_cast<float>(acc[k] / n);
      light.mutable_table(j).append(std::move(mean));
    }
  }
  light.set_total_count(full.total_count());
  return light;
}

IndexStats index_stats(const HashIndex& index) {
  IndexStats stats{index.variant(), index.code_len(), index.total_count(), {}};
  for (std::uint32_t j = 0; j < index.num_tables(); ++j) {
    TableStats t;
    auto buckets = index.table(j).buckets();
    t.num_buckets = buckets.size();
    if (!buckets.empty()) {
      t.min_size = std::numeric_limits<std::uint64_t>::max();
      for (const Bucket& bucket : buckets) {
        t.min_size = std::min(t.min_size, bucket.count);
        t.max_size = std::max(t.max_size, bucket.count);
        t.total += bucket.count;
      }
      t.mean_size = static_cast<double>(t.total) / static_cast<double>(buckets.size());
    }
    stats.tables.push_back(t);
  }
  return stats;
}

std::vector<std::uint8_t> HashIndex::serialize() const {
  ByteWriter w;
  w.put_magic(kIndexMagic);
  w.put_u8(static_cast<std::uint8_t>(variant_));
  w.put_u32(code_len_);
  w.put_u32(num_tables());
  w.put_u64(total_count_);
  w.put_u64(encoder_fingerprint_);
  for (const HashTable& table : tables_) {
    w.put_u64(table.size());
    for (const Bucket& bucket : table.buckets()) {
      w.put_bytes(bucket.key.bytes());
      w.put_u64(bucket.count);
      w.put_f32s(bucket.payload);
    }
  }
  return w.release();
}

HashIndex HashIndex::deserialize(std::span<const std::uint8_t> bytes, std::string_view source) {
  ByteReader rd(bytes, std::string(source));
  rd.expect_magic(kIndexMagic);
  const std::uint8_t raw_variant = rd.get_u8("variant");
  if (raw_variant > 1) rd.fail("unknown index variant " + std::to_string(raw_variant));
  const auto variant = static_cast<IndexVariant>(raw_variant);
  const std::uint32_t r = rd.get_u32("r");
  const std::uint32_t b = rd.get_u32("b");
  const std::uint64_t n = rd.get_u64("N");
  const std::uint64_t fingerprint = rd.get_u64("encoder fingerprint");
  if (r == 0 || b == 0) rd.fail("header declares r or b = 0");

  HashIndex index(variant, r, b, fingerprint);
  index.set_total_count(n);
  const std::size_t key_bytes = BinaryKey::packed_size(r);
  for (std::uint32_t j = 0; j < b; ++j) {
    const std::uint64_t bucket_count = rd.get_u64("bucket count");
    if (bucket_count > rd.remaining() / (key_bytes + 8)) {
      rd.fail("bucket count " + std::to_string(bucket_count) + " exceeds file size");
    }
    std::uint64_t population = 0;
    for (std::uint64_t s = 0; s < bucket_count; ++s) {
      auto raw_key = rd.get_bytes(key_bytes, "bucket key");
      Bucket bucket;
      try {
        bucket.key = BinaryKey(r, std::vector<std::uint8_t>(raw_key.begin(), raw_key.end()));
      } catch (const DataError& e) {
        rd.fail(e.what());
      }
      bucket.count = rd.get_u64("bucket population");
      if (bucket.count == 0) rd.fail("empty bucket");
      if (variant == IndexVariant::kFull && bucket.count > rd.remaining() / (4ULL * r)) {
        rd.fail("bucket payload exceeds file size");
      }
      const std::uint64_t floats = variant == IndexVariant::kFull ? bucket.count * r : r;
      bucket.payload.resize(floats);
      rd.get_f32s(bucket.payload, "bucket payload");
      if (variant == IndexVariant::kFull) {
        for (std::uint64_t i = 0; i < bucket.count; ++i) {
          if (!(binarize(bucket.code(i, r)) == bucket.key)) {
            rd.fail("stored code does not binarize to its bucket key");
          }
        }
      }
      population += bucket.count;
      try {
        index.mutable_table(j).append(std::move(bucket));
      } catch (const DataError& e) {
        rd.fail(e.what());
      }
    }
    if (population != n) {
      rd.fail("table " + std::to_string(j) + " holds " + std::to_string(population) +
              " codes, header says N=" + std::to_string(n));
    }
  }
  rd.expect_end();
  return index;
}

void save_index(const HashIndex& index, const std::filesystem::path& path) {
  write_file(path, index.serialize());
}

HashIndex load_index(const std::filesystem::path& path, const HashEncoder* encoder,
                     FingerprintCheck check) {
  HashIndex index = HashIndex::deserialize(read_file(path), path.string());
  if (encoder != nullptr && check != FingerprintCheck::kIgnore) {
    if (encoder->code_len() != index.code_len() || encoder->num_tables() != index.num_tables()) {
      throw DataError(path.string() + ": index shape (r=" + std::to_string(index.code_len()) +
                      ", b=" + std::to_string(index.num_tables()) +
                      ") does not match the encoder");
    }
    if (encoder->fingerprint() != index.encoder_fingerprint()) {
      const std::string msg = path.string() +
                              ": index was built with a different encoder (fingerprint mismatch)";
      if (check == FingerprintCheck::kStrict) throw DataError(msg);
      std::cerr << "warning: " << msg << "\n";
    }
  }
  return index;
}

}  // namespace llsh
