// Copyright 2026 The sim2road Authors.
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
// Batch command-line front end. The executable is a thin shell around
// run_cli so tests can drive every command in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sim2road::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericalError = 4,
};

/// Parses `args` (without the program name) and runs the selected
/// subcommand. Never throws: failures are reported on `err` and mapped to
/// an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sim2road::cli
