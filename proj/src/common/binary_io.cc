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

#include "llsh/common/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "llsh/common/error.h"

namespace llsh {
namespace {

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T decode_le(const std::uint8_t* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(p[i]) << (8 * i);
  }
  return value;
}

}  // namespace

void ByteWriter::put_bytes(std::span<const std::uint8_t> bytes) {
  bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::put_magic(std::string_view magic) {
  bytes_.insert(bytes_.end(), magic.begin(), magic.end());
}

void ByteWriter::put_u8(std::uint8_t v) { bytes_.push_back(v); }
void ByteWriter::put_u32(std::uint32_t v) { append_le(bytes_, v); }
void ByteWriter::put_u64(std::uint64_t v) { append_le(bytes_, v); }
void ByteWriter::put_f32(float v) { append_le(bytes_, std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::put_f32s(std::span<const float> values) {
  bytes_.reserve(bytes_.size() + 4 * values.size());
  for (float v : values) put_f32(v);
}

ByteReader::ByteReader(std::span<const std::uint8_t> bytes, std::string source)
    : bytes_(bytes), source_(std::move(source)) {}

void ByteReader::fail(std::string_view message) const {
  throw DataError(source_ + ": " + std::string(message) + " (byte offset " +
                  std::to_string(offset_) + ")");
}

void ByteReader::require(std::size_t n, std::string_view what) {
  if (remaining() < n) {
    fail("truncated: expected " + std::to_string(n) + " bytes for " + std::string(what) +
         ", " + std::to_string(remaining()) + " available");
  }
}

void ByteReader::expect_magic(std::string_view magic) {
  require(magic.size(), "magic");
  if (std::memcmp(bytes_.data() + offset_, magic.data(), magic.size()) != 0) {
    fail("bad magic: expected \"" + std::string(magic) + "\"");
  }
  offset_ += magic.size();
}

std::uint8_t ByteReader::get_u8(std::string_view what) {
  require(1, what);
  return bytes_[offset_++];
}

std::uint32_t ByteReader::get_u32(std::string_view what) {
  require(4, what);
  auto v = decode_le<std::uint32_t>(bytes_.data() + offset_);
  offset_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64(std::string_view what) {
  require(8, what);
  auto v = decode_le<std::uint64_t>(bytes_.data() + offset_);
  offset_ += 8;
  return v;
}

float ByteReader::get_f32(std::string_view what) {
  return std::bit_cast<float>(get_u32(what));
}

void ByteReader::get_f32s(std::span<float> out, std::string_view what) {
  require(4 * out.size(), what);
  const std::uint8_t* p = bytes_.data() + offset_;
  for (std::size_t i = 0; i < out.size(); ++i, p += 4) {
    out[i] = std::bit_cast<float>(decode_le<std::uint32_t>(p));
  }
  offset_ += 4 * out.size();
}

std::span<const std::uint8_t> ByteReader::get_bytes(std::size_t n, std::string_view what) {
  require(n, what);
  auto view = bytes_.subspan(offset_, n);
  offset_ += n;
  return view;
}

void ByteReader::expect_end() {
  if (remaining() != 0) {
    fail(std::to_string(remaining()) + " trailing bytes after payload");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError(path.string() + ": read failed");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace llsh
