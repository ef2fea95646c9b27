// Copyright 2026 The KeyAuth Authors
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

#ifndef KEYAUTH_TOOLS_TERMINAL_H_
#define KEYAUTH_TOOLS_TERMINAL_H_

#include <optional>
#include <string>

#include "keyauth/bytes.h"

namespace keyauth::tools {

// Reads a line from the controlling terminal with echo off. Returns nullopt
// when there is no terminal.
std::optional<SecretString> read_secret(const std::string& prompt);

// Shows `prompt` and reads a y/N answer from the terminal, or from stdin
// when stdin is redirected. End of input means no.
bool confirm(const std::string& prompt);

}  // namespace keyauth::tools

#endif  // KEYAUTH_TOOLS_TERMINAL_H_
