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

#include "llsh/features.h"

#include <string>

#include "llsh/common/error.h"

namespace llsh {

FeatureMatrix::FeatureMatrix(std::uint32_t dim, std::vector<float> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 && !values_.empty()) throw DataError("feature matrix: zero dimension");
  if (dim_ != 0 && values_.size() % dim_ != 0) {
    throw DataError("feature matrix: " + std::to_string(values_.size()) +
                    " values is not a multiple of d=" + std::to_string(dim_));
  }
}

void FeatureMatrix::append(std::span<const float> row) {
  if (row.size() != dim_) {
    throw DataError("feature matrix: row of dimension " + std::to_string(row.size()) +
                    " appended to d=" + std::to_string(dim_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

}  // namespace llsh
