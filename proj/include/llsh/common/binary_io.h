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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llsh {

// Append-only little-endian encoder used by every on-disk format.
class ByteWriter {
 public:
  void put_bytes(std::span<const std::uint8_t> bytes);
  void put_magic(std::string_view magic);
  void put_u8(std::uint8_t v);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f32(float v);
  void put_f32s(std::span<const float> values);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> release() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked little-endian decoder. Every failure is a DataError naming
// the source and the byte offset at which the expectation was not met.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string source);

  void expect_magic(std::string_view magic);
  std::uint8_t get_u8(std::string_view what);
  std::uint32_t get_u32(std::string_view what);
  std::uint64_t get_u64(std::string_view what);
  float get_f32(std::string_view what);
  void get_f32s(std::span<float> out, std::string_view what);
  std::span<const std::uint8_t> get_bytes(std::size_t n, std::string_view what);

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }
  const std::string& source() const { return source_; }

  // Throws unless the whole buffer has been consumed.
  void expect_end();
  [[noreturn]] void fail(std::string_view message) const;

 private:
  void require(std::size_t n, std::string_view what);

  std::span<const std::uint8_t> bytes_;
  std::string source_;
  std::size_t offset_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// 64-bit FNV-1a. Stable across platforms; used for encoder fingerprints.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace llsh
