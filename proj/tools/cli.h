// Copyright 2026 The planted Authors
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

#ifndef PLANTED_TOOLS_CLI_H_
#define PLANTED_TOOLS_CLI_H_

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

#include "planted/error.h"

namespace planted::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInternal = 4;
inline constexpr int kExitInterrupted = 130;

int exit_code_for(ErrorCode code);

// Runs the command line `args` (args[0] is the program name). Results go to
// `out`, diagnostics to `err`. `stop` interrupts a running experiment.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop = nullptr);

}  // namespace planted::cli

#endif  // PLANTED_TOOLS_CLI_H_
