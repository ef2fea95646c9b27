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

#ifndef KEYAUTH_CLOCK_H_
#define KEYAUTH_CLOCK_H_

#include <chrono>
#include <cstdint>
#include <functional>

namespace keyauth {

// Seconds since the Unix epoch. Injected so expiry can be tested without
// sleeping.
using Clock = std::function<std::int64_t()>;

inline std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace keyauth

#endif  // KEYAUTH_CLOCK_H_
