// Copyright 2026 The cote Authors.
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

#ifndef COTE_CLI_H_
#define COTE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace cote {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartialRefine = 3;

// Entry point of the `cote` binary. `args` excludes the program name.
// Data goes to --out or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

const char* version_string();

}  // namespace cote

#endif  // COTE_CLI_H_
