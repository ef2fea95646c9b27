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

#include "keyauth/errors.h"

namespace keyauth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedJson: return "malformed-json";
    case ErrorCode::kUnknownVersion: return "unknown-version";
    case ErrorCode::kUnknownType: return "unknown-type";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kIdFormat: return "id-format";
    case ErrorCode::kUnauthorized: return "unauthorized";
    case ErrorCode::kInvalidKey: return "invalid-key";
    case ErrorCode::kUnknownUser: return "unknown-user";
    case ErrorCode::kUnknownChallenge: return "unknown-challenge";
    case ErrorCode::kUnknownKey: return "unknown-key";
    case ErrorCode::kExpired: return "expired";
    case ErrorCode::kAlreadyConsumed: return "already-consumed";
    case ErrorCode::kBadSignature: return "bad-signature";
    case ErrorCode::kCryptoFailure: return "crypto-failure";
  }
  return "crypto-failure";
}

std::optional<ErrorCode> parse_error_code(std::string_view text) {
  for (ErrorCode code : kAllErrorCodes) {
    if (to_string(code) == text) return code;
  }
  return std::nullopt;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnauthorized:
    case ErrorCode::kBadSignature:
      return 401;
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownChallenge:
    case ErrorCode::kUnknownKey:
      return 404;
    case ErrorCode::kExpired:
    case ErrorCode::kAlreadyConsumed:
      return 409;
    case ErrorCode::kCryptoFailure:
      return 500;
    case ErrorCode::kMalformedJson:
    case ErrorCode::kUnknownVersion:
    case ErrorCode::kUnknownType:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kIdFormat:
    case ErrorCode::kInvalidKey:
      return 400;
  }
  return 500;
}

}  // namespace keyauth
