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
#include <span>
#include <vector>

namespace llsh {

// Row-major block of d-dimensional feature vectors (the unit of indexing and
// querying). Values are stored at 32-bit precision.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::uint32_t dim) : dim_(dim) {}
  FeatureMatrix(std::uint32_t dim, std::vector<float> values);

  std::uint32_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return values_.empty(); }

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values_).subspan(i * dim_, dim_);
  }
  std::span<float> row(std::size_t i) {
    return std::span<float>(values_).subspan(i * dim_, dim_);
  }

  void append(std::span<const float> row);
  void reserve_rows(std::size_t n) { values_.reserve(n * dim_); }

  std::span<const float> values() const { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::vector<float> values_;
};

// Frame interval [start_frame, start_frame + length) covered by one feature.
struct FrameSpan {
  std::uint64_t start_frame = 0;
  std::uint32_t length = 1;

  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

}  // namespace llsh
