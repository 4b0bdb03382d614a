// Copyright 2026 The bookpair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bookpair/synthgen.hpp"
#include "bookpair/types.hpp"

namespace bookpair::cli {

// Stable exit codes; scripts rely on them.
enum ExitStatus : int {
  kOk = 0,
  kValidationFailure = 1,
  kIoOrSchemaError = 2,
  kInternalError = 3,
};

// Both sections are optional in a config file:
//   {"pipeline": {...PipelineConfig fields...},
//    "generator": {...GenConfig fields..., "n_books": 8, "books": [...]}}
struct ConfigFile {
  PipelineConfig pipeline;
  GenConfig generator;
  long n_books = 8;
  std::vector<BookMetadata> books;  // empty: use default_meta_pool(n_books)
};

ConfigFile load_config_file(const std::string& path);

// Runs one command line (args[0] is the program name). Regular output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bookpair::cli
