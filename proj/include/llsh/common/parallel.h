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
#include <functional>

namespace llsh {

// Process-wide worker count used by every parallel stage. 0 means one worker
// per hardware thread.
void set_worker_count(unsigned workers);
unsigned worker_count();

// Runs fn(begin, end) over contiguous chunks covering [0, n). Chunks are
// disjoint, so callers that write results by index and reduce in index order
// afterwards get output independent of the worker count. The first exception
// thrown by any chunk is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace llsh
