/*
 * Copyright 2026 The rankfuse Authors.
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

#ifndef RANKFUSE_TOOLS_CLI_H_
#define RANKFUSE_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace rankfuse::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kDataError = 3,
  kIoError = 4,
};

// Runs one command line (args exclude the program name). Normal output goes
// to `out`, diagnostics and warnings to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace rankfuse::cli

#endif  // RANKFUSE_TOOLS_CLI_H_
