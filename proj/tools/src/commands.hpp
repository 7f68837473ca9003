/*
 * Copyright 2026 The forster Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef FORSTER_TOOLS_COMMANDS_HPP_
#define FORSTER_TOOLS_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace forster::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAlgorithmic = 1;
inline constexpr int kExitUsage = 2;

// Parses `args` (without the program name), runs one subcommand and writes
// the JSON report to `out`. Diagnostics for usage errors go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace forster::cli

#endif  // FORSTER_TOOLS_COMMANDS_HPP_
