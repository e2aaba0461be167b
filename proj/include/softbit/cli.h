// Copyright 2026 The Softbit Authors. All Rights Reserved.
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

#ifndef SOFTBIT_CLI_H_
#define SOFTBIT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace softbit {

// Exit statuses of the command-line tool.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // internal error, e.g. training diverged
constexpr int kExitBadInput = 2;  // usage error, missing or corrupt input

// Runs `softbit <subcommand> ...`. args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace softbit

#endif  // SOFTBIT_CLI_H_
