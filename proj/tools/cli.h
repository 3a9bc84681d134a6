// tools/cli.h

// Copyright 2026  The spkmix Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPKMIX_TOOLS_CLI_H_
#define SPKMIX_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace spkmix::cli {

// Exit status of a command line run.
enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

// Runs the tool with args[0] as the program name. Normal output goes to
// out, diagnostics to err.
int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

}  // namespace spkmix::cli

#endif  // SPKMIX_TOOLS_CLI_H_
