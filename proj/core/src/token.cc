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

#include "keyauth/token.h"

#include <nlohmann/json.hpp>

#include "keyauth/protocol.h"

namespace keyauth {
namespace {

using json = nlohmann::json;

std::optional<TokenClaims> parse_claims(std::string_view payload) {
  json doc = json::parse(payload, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.size() != 7) {
    return std::nullopt;
  }
  auto str = [&](const char* key) -> std::optional<std::string> {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  auto num = [&](const char* key) -> std::optional<std::int64_t> {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number_integer()) return std::nullopt;
    return it->get<std::int64_t>();
  };

  auto v = str("v");
  auto user = str("user_id");
  auto service = str("service_id");
  auto fp = str("fingerprint");
  auto token_id = str("token_id");
  auto issued = num("issued_at");
  auto expires = num("expires_at");
  if (!v || *v != kTokenVersion || !user || !service || !fp || !token_id ||
      !issued || !expires) {
    return std::nullopt;
  }
  if (!protocol::is_valid_id(*user) || !protocol::is_valid_id(*service)) {
    return std::nullopt;
  }
  auto fingerprint = Fingerprint::from_base64url(*fp);
  auto id = TokenId::from_base64url(*token_id);
  if (!fingerprint || !id) return std::nullopt;

  return TokenClaims{*user, *service, *fingerprint, *issued, *expires, *id};
}

}  // namespace

std::string mint_token(const crypto::PrivateKey& server_key,
                       const TokenClaims& claims) {
  const json payload = {
      {"v", kTokenVersion},
      {"user_id", claims.user_id},
      {"service_id", claims.service_id},
      {"fingerprint", claims.fingerprint.to_base64url()},
      {"issued_at", claims.issued_at},
      {"expires_at", claims.expires_at},
      {"token_id", claims.token_id.to_base64url()},
  };
  const std::string octets = payload.dump();
  const crypto::Signature sig = crypto::sign(server_key, as_bytes(octets));
  return base64url_encode(octets) + "." + base64url_encode(ByteView(sig));
}

std::string_view to_string(TokenStatus status) {
  switch (status) {
    case TokenStatus::kValid: return "valid";
    case TokenStatus::kMalformed: return "malformed";
    case TokenStatus::kBadSignature: return "bad-signature";
    case TokenStatus::kExpired: return "expired";
  }
  return "malformed";
}

TokenCheck check_token(const crypto::PublicKey& server_key,
                       std::string_view token, std::int64_t now) {
  const auto dot = token.find('.');
  if (dot == std::string_view::npos || token.find('.', dot + 1) != std::string_view::npos) {
    return {TokenStatus::kMalformed, std::nullopt};
  }
  auto payload = base64url_decode(token.substr(0, dot));
  auto sig = base64url_decode(token.substr(dot + 1));
  if (!payload || !sig || payload->empty() || sig->empty()) {
    return {TokenStatus::kMalformed, std::nullopt};
  }
  if (!crypto::verify(server_key, *payload, *sig)) {
    return {TokenStatus::kBadSignature, std::nullopt};
  }
  auto claims = parse_claims(as_chars(*payload));
  if (!claims) return {TokenStatus::kMalformed, std::nullopt};
  if (now >= claims->expires_at) return {TokenStatus::kExpired, claims};
  return {TokenStatus::kValid, claims};
}

}  // namespace keyauth
