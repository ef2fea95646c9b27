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

// Assertion tokens: base64url(payload_json) "." base64url(signature), where
// the signature is the server key's RSA-PSS signature over the exact
// payload_json octets. Payload fields:
//
//   v ("keyauth-token-1"), user_id, service_id, fingerprint, issued_at,
//   expires_at, token_id

#ifndef KEYAUTH_TOKEN_H_
#define KEYAUTH_TOKEN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "keyauth/bytes.h"
#include "keyauth/crypto.h"

namespace keyauth {

inline constexpr std::string_view kTokenVersion = "keyauth-token-1";

struct TokenClaims {
  std::string user_id;
  std::string service_id;
  Fingerprint fingerprint;
  std::int64_t issued_at = 0;
  std::int64_t expires_at = 0;
  TokenId token_id;

  bool operator==(const TokenClaims&) const = default;
};

std::string mint_token(const crypto::PrivateKey& server_key,
                       const TokenClaims& claims);

enum class TokenStatus { kValid, kMalformed, kBadSignature, kExpired };

// Wire reason string: "valid", "malformed", "bad-signature", "expired".
std::string_view to_string(TokenStatus status);

struct TokenCheck {
  TokenStatus status = TokenStatus::kMalformed;
  // Set when the signature verified, including for expired tokens.
  std::optional<TokenClaims> claims;

  bool valid() const { return status == TokenStatus::kValid; }
};

// Valid iff the token parses, the signature verifies over the payload octets
// and now < expires_at.
TokenCheck check_token(const crypto::PublicKey& server_key,
                       std::string_view token, std::int64_t now);

}  // namespace keyauth

#endif  // KEYAUTH_TOKEN_H_
