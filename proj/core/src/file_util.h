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

#ifndef KEYAUTH_SRC_FILE_UTIL_H_
#define KEYAUTH_SRC_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace keyauth::internal {

// Writes `content` to a temporary sibling of `path` with the given POSIX
// mode, fsyncs it and renames it over `path`. Readers see either the old or
// the new file. Throws std::system_error.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view content, unsigned mode);

// Like atomic_write_file but fails with EEXIST instead of replacing.
void atomic_create_file(const std::filesystem::path& path,
                        std::string_view content, unsigned mode);

std::string read_file(const std::filesystem::path& path);

// Creates `dir` (and parents) restricted to the owner. An existing
// directory is left as it is.
void ensure_private_directory(const std::filesystem::path& dir);

}  // namespace keyauth::internal

#endif  // KEYAUTH_SRC_FILE_UTIL_H_
