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

#ifndef KEYAUTH_ERRORS_H_
#define KEYAUTH_ERRORS_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace keyauth {

// The closed set of codes an ErrorReply may carry on the wire.
enum class ErrorCode {
  kMalformedJson,
  kUnknownVersion,
  kUnknownType,
  kSchemaViolation,
  kIdFormat,
  kUnauthorized,
  kInvalidKey,
  kUnknownUser,
  kUnknownChallenge,
  kUnknownKey,
  kExpired,
  kAlreadyConsumed,
  kBadSignature,
  kCryptoFailure,
};

inline constexpr ErrorCode kAllErrorCodes[] = {
    ErrorCode::kMalformedJson,    ErrorCode::kUnknownVersion,
    ErrorCode::kUnknownType,      ErrorCode::kSchemaViolation,
    ErrorCode::kIdFormat,         ErrorCode::kUnauthorized,
    ErrorCode::kInvalidKey,       ErrorCode::kUnknownUser,
    ErrorCode::kUnknownChallenge, ErrorCode::kUnknownKey,
    ErrorCode::kExpired,          ErrorCode::kAlreadyConsumed,
    ErrorCode::kBadSignature,     ErrorCode::kCryptoFailure,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view text);

// HTTP status used when the code travels as an ErrorReply.
int http_status(ErrorCode code);

// A failure that maps onto exactly one wire error code.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace keyauth

#endif  // KEYAUTH_ERRORS_H_
