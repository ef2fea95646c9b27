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

#include <set>
#include <string>

#include <nlohmann/json.hpp>
#include <gtest/gtest.h>

#include "keyauth/crypto.h"
#include "keyauth/token.h"
#include "test_support.h"

namespace keyauth {
namespace {

using keyauth::testing::test_keypair;

TokenClaims sample_claims() {
  return TokenClaims{"alice", "mail", crypto::fingerprint(test_keypair(1).public_key), 1000,
                     1900, TokenId::random()};
}

TEST(Token, ValidUntilExpiry) {
  const auto& server = test_keypair(0);
  const auto claims = sample_claims();
  const std::string token = mint_token(server.private_key, claims);
  auto check = check_token(server.public_key, token, 1000);
  EXPECT_EQ(check.status, TokenStatus::kValid);
  ASSERT_TRUE(check.claims);
  EXPECT_EQ(*check.claims, claims);
  EXPECT_TRUE(check_token(server.public_key, token, 1899).valid());
  check = check_token(server.public_key, token, 1900);
  EXPECT_EQ(check.status, TokenStatus::kExpired);
  EXPECT_TRUE(check.claims);
}

TEST(Token, PayloadFields) {
  const std::string token = mint_token(test_keypair(0).private_key, sample_claims());
  const auto dot = token.find('.');
  ASSERT_NE(dot, std::string::npos);
  const auto raw = base64url_decode(token.substr(0, dot));
  ASSERT_TRUE(raw);
  const auto j = nlohmann::json::parse(as_chars(*raw));
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"v", "user_id", "service_id", "fingerprint", "issued_at",
                                         "expires_at", "token_id"}));
  EXPECT_EQ(j["v"], "keyauth-token-1");
  EXPECT_EQ(j["expires_at"], 1900);
}

TEST(Token, WrongServerKey) {
  const std::string token = mint_token(test_keypair(0).private_key, sample_claims());
  EXPECT_EQ(check_token(test_keypair(1).public_key, token, 1000).status,
            TokenStatus::kBadSignature);
}

TEST(Token, EveryCharacterSubstitutionRejected) {
  const auto& server = test_keypair(0);
  const std::string token = mint_token(server.private_key, sample_claims());
  for (std::size_t i = 0; i < token.size(); ++i) {
    std::string t = token;
    t[i] = t[i] == 'A' ? 'B' : 'A';
    const auto status = check_token(server.public_key, t, 1000).status;
    EXPECT_NE(status, TokenStatus::kValid) << "position " << i;
  }
}

TEST(Token, Malformed) {
  const auto& key = test_keypair(0).public_key;
  for (const std::string t : {"", ".", "abc", "abc.", ".abc", "a.b.c", "!!.??"}) {
    EXPECT_EQ(check_token(key, t, 0).status, TokenStatus::kMalformed) << t;
  }
}

TEST(Token, StatusNames) {
  EXPECT_EQ(to_string(TokenStatus::kValid), "valid");
  EXPECT_EQ(to_string(TokenStatus::kMalformed), "malformed");
  EXPECT_EQ(to_string(TokenStatus::kBadSignature), "bad-signature");
  EXPECT_EQ(to_string(TokenStatus::kExpired), "expired");
}

}  // namespace
}  // namespace keyauth
