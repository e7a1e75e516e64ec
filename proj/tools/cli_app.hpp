// Copyright 2026 The anytime-sched Authors
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

#ifndef ANYTIME_TOOLS_CLI_APP_HPP_
#define ANYTIME_TOOLS_CLI_APP_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace anytime::cli {

/// Runs the command line `args` (program name excluded). Returns the process
/// exit status; results go to `out` unless --out names a file.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace anytime::cli

#endif  // ANYTIME_TOOLS_CLI_APP_HPP_
