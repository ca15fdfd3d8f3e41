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

#include "llsh/data/feature_file.h"

#include <string>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"

namespace llsh {
namespace {

constexpr std::string_view kFeatureMagic = "LLSHFVS1";
constexpr std::uint8_t kHasTimestamps = 0x1;

}  // namespace

std::vector<std::uint8_t> FeatureFile::serialize() const {
  if (spans && spans->size() != features.rows()) {
    throw DataError("feature file: " + std::to_string(spans->size()) + " spans for " +
                    std::to_string(features.rows()) + " records");
  }
  ByteWriter w;
  w.put_magic(kFeatureMagic);
  w.put_u32(features.dim());
  w.put_u64(features.rows());
  w.put_u8(spans ? kHasTimestamps : 0);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    w.put_f32s(features.row(i));
    if (spans) {
      w.put_u64((*spans)[i].start_frame);
      w.put_u32((*spans)[i].length);
    }
  }
  return w.release();
}

FeatureFile FeatureFile::deserialize(std::span<const std::uint8_t> bytes, std::string_view source) {
  ByteReader rd(bytes, std::string(source));
  rd.expect_magic(kFeatureMagic);
  const std::uint32_t d = rd.get_u32("d");
  const std::uint64_t count = rd.get_u64("count");
  const std::uint8_t flags = rd.get_u8("flags");
  if (d == 0) rd.fail("header declares d = 0");
  if (flags & ~kHasTimestamps) rd.fail("unknown flag bits " + std::to_string(flags));
  const bool timed = flags & kHasTimestamps;
  const std::uint64_t record = 4ULL * d + (timed ? 12 : 0);
  if (count > rd.remaining() / record || count * record != rd.remaining()) {
    rd.fail("payload is " + std::to_string(rd.remaining()) + " bytes, header implies " +
            std::to_string(count) + " records of " + std::to_string(record) + " bytes");
  }

  FeatureFile out;
  std::vector<float> values(count * d);
  if (timed) out.spans.emplace(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    rd.get_f32s(std::span<float>(values).subspan(i * d, d), "feature values");
    if (timed) {
      (*out.spans)[i].start_frame = rd.get_u64("start frame");
      (*out.spans)[i].length = rd.get_u32("span");
      if ((*out.spans)[i].length == 0) rd.fail("record " + std::to_string(i) + " has span 0");
    }
  }
  rd.expect_end();
  out.features = FeatureMatrix(d, std::move(values));
  return out;
}

std::vector<FrameSpan> FeatureFile::spans_or_identity() const {
  if (spans) return *spans;
  std::vector<FrameSpan> out(features.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = FrameSpan{i, 1};
  return out;
}

void save_features(const FeatureFile& file, const std::filesystem::path& path) {
  write_file(path, file.serialize());
}

FeatureFile load_features(const std::filesystem::path& path) {
  return FeatureFile::deserialize(read_file(path), path.string());
}

}  // namespace llsh
