// Copyright 2026 The unimod Authors
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

#include <iosfwd>
#include <string>
#include <vector>

#include "unimod/io.h"

namespace unimod::cli {

enum class Status { kOk, kCheckFailed, kError };

// Exit codes: 0 ok, 1 check failed, 2 error (usage, parse, library error).
int exit_code(Status s);

struct CommandResult {
  Status status = Status::kOk;
  io::Json payload;
  std::string summary;  // one line for standard error
  std::string output;   // text for standard output; empty when --output was given
};

// `args` excludes the program name. Inputs named "-" (or omitted) are read
// from `in`. Files named by --output and --dot are written here.
CommandResult run(const std::vector<std::string>& args, std::istream& in);

// DOT for network, distribution or extension JSON; distributions render one
// graph per atom.
std::string dot_of_json(const io::Json& j);

}  // namespace unimod::cli
