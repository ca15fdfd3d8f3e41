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

#include "run_record.h"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>

#include "llsh/simd/kernels.h"
#include "llsh/version.h"

namespace llsh::cli {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunRecord::RunRecord() : start_(std::chrono::steady_clock::now()) {
  doc_ = {{"command", ""},
          {"argv", nlohmann::json::array()},
          {"config", nlohmann::json::object()},
          {"fingerprints", nlohmann::json::object()},
          {"outputs", nlohmann::json::array()},
          {"results", nlohmann::json::object()}};
  doc_["versions"] = {
      {"llsh", kVersion},
      {"formats", {{"encoder", "LLSHENC1"}, {"index", "LLSHIDX1"}, {"features", "LLSHFVS1"}}},
      {"compiler", __VERSION__},
      {"cli11", CLI11_VERSION},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"simd", std::string(simd::isa_name(simd::active_kernels().isa))}};
}

void RunRecord::fingerprint(const std::string& name, std::uint64_t value) {
  doc_["fingerprints"][name] = hex64(value);
}

void RunRecord::output(const std::filesystem::path& path) { doc_["outputs"].push_back(path.string()); }

bool RunRecord::write(const std::filesystem::path& path, int exit_code, const std::string& error) {
  doc_["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  doc_["exit_code"] = exit_code;
  doc_["error"] = error.empty() ? nlohmann::json(nullptr) : nlohmann::json(error);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) return false;
  out << doc_.dump(2) << "\n";
  return static_cast<bool>(out);
}

}  // namespace llsh::cli
