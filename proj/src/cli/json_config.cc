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

#include "json_config.h"

#include <CLI11.hpp>
#include <json.hpp>

#include "llsh/common/binary_io.h"
#include "llsh/common/error.h"

namespace llsh::cli {
namespace {

using nlohmann::json;

std::string scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("config: key '" + key + "' must be a string, number, boolean or array of them");
}

// Arguments for one JSON object at the level of `app`. Sub-objects naming a
// subcommand are returned separately.
std::vector<std::string> flatten(const json& obj, const CLI::App& app,
                                 std::vector<std::pair<std::string, const json*>>& nested) {
  std::vector<std::string> out;
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      if (app.get_subcommand_no_throw(key) == nullptr) {
        throw UsageError("config: '" + key + "' is not a subcommand of '" + app.get_name() + "'");
      }
      nested.emplace_back(key, &value);
      continue;
    }
    if (value.is_array()) {
      for (const json& item : value) out.push_back("--" + key + "=" + scalar(item, key));
      continue;
    }
    out.push_back("--" + key + "=" + scalar(value, key));
  }
  return out;
}

bool takes_value(const CLI::App* app, const std::string& token) {
  if (token.rfind("--", 0) != 0 || token.find('=') != std::string::npos) return false;
  for (const CLI::App* a = app; a != nullptr; a = a->get_parent()) {
    if (const CLI::Option* opt = a->get_option_no_throw(token)) return opt->get_expected_max() != 0;
  }
  return false;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  json doc;
  try {
    const auto bytes = read_file(path);
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const DataError& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const json::parse_error& e) {
    throw UsageError("config: " + path + " is not valid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw UsageError("config: " + path + " must hold a JSON object");

  // Subcommand tokens on the command line, with their insertion points.
  std::vector<std::pair<const CLI::App*, std::size_t>> chain;
  const CLI::App* current = &app;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (takes_value(current, args[i])) {
      ++i;
      continue;
    }
    if (const CLI::App* sub = current->get_subcommand_no_throw(args[i])) {
      chain.emplace_back(sub, i + 1);
      current = sub;
    }
  }

  std::vector<std::pair<std::size_t, std::vector<std::string>>> inserts;
  std::vector<std::pair<std::string, const json*>> nested;
  inserts.emplace_back(0, flatten(doc, app, nested));
  for (const auto& [sub, pos] : chain) {
    std::vector<std::pair<std::string, const json*>> next;
    for (const auto& [name, obj] : nested) {
      if (name != sub->get_name()) continue;
      inserts.emplace_back(pos, flatten(*obj, *sub, next));
    }
    nested = std::move(next);
  }

  std::vector<std::string> out = args;
  for (auto it = inserts.rbegin(); it != inserts.rend(); ++it) {
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(it->first), it->second.begin(),
               it->second.end());
  }
  return out;
}

}  // namespace llsh::cli
