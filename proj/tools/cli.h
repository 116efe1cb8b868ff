// tools/cli.h

// Copyright 2026  splda-vb authors

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

#ifndef SPLDA_TOOLS_CLI_H_
#define SPLDA_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace splda::cli {

/// Runs the splda-vb command line; args[0] is the program name.  Returns
/// the process exit code.
int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

}  // namespace splda::cli

#endif  // SPLDA_TOOLS_CLI_H_
