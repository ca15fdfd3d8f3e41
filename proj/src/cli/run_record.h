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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace llsh::cli {

// JSON document written after every invocation:
//   command, argv, config (resolved option values), fingerprints, outputs,
//   results, versions, wall_time_seconds, exit_code, error.
class RunRecord {
 public:
  RunRecord();

  nlohmann::json& config() { return doc_["config"]; }
  nlohmann::json& results() { return doc_["results"]; }

  void set_command(const std::string& command) { doc_["command"] = command; }
  void set_argv(const std::vector<std::string>& argv) { doc_["argv"] = argv; }
  void fingerprint(const std::string& name, std::uint64_t value);
  void output(const std::filesystem::path& path);

  // Fills timing and status and writes the file. Never throws.
  bool write(const std::filesystem::path& path, int exit_code, const std::string& error);

  const nlohmann::json& document() const { return doc_; }

 private:
  std::chrono::steady_clock::time_point start_;
  nlohmann::json doc_;
};

std::string hex64(std::uint64_t v);

}  // namespace llsh::cli
