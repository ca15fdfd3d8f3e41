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

#include <stdexcept>
#include <string>

namespace llsh {

// Root of all library errors. The CLI maps each subclass onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad invocation or invalid configuration values.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed, missing or inconsistent input data (files, dimensions, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate values, arithmetic overflow.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace llsh
