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

#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace llsh::cli {

// Splices the JSON file named by --config into the argument list. Top-level
// scalar keys become global "--key=value" arguments placed first; an object
// keyed by a subcommand name that appears on the command line expands right
// after that subcommand. Explicit arguments come later and therefore win.
// Sections for subcommands not being run are ignored.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app);

}  // namespace llsh::cli
