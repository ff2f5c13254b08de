// Copyright 2026 The DP Mobility Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMOB_CLI_H_
#define DPMOB_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dpmob {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // verify-dp outside the bound
inline constexpr int kExitInput = 2;        // usage or input error
inline constexpr int kExitEmptyWindow = 3;

// Subcommands: privatize, compare, aggregate, metrics, synth network,
// synth trips, verify-dp. args[0] is the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dpmob

#endif  // DPMOB_CLI_H_
