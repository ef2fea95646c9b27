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

#include <map>
#include <string>

#include <gtest/gtest.h>

#include "keyauth/server/config.h"

namespace keyauth::server {
namespace {

TEST(Config, Defaults) {
  const ServerConfig c;
  EXPECT_EQ(c.listen_address, "127.0.0.1:8517");
  EXPECT_EQ(c.challenge_ttl, 120);
  EXPECT_EQ(c.token_ttl, 900);
  EXPECT_EQ(c.registration_mode, RegistrationMode::kOpen);
  EXPECT_EQ(c.server_key_bits, 3072);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.host(), "127.0.0.1");
  EXPECT_EQ(c.port(), 8517);
}

TEST(Config, ParsesAllKeys) {
  const auto c = parse_config(R"(
# comment
listen = 0.0.0.0:9000
data_dir = /var/lib/keyauth   # trailing comment
challenge_ttl = 30
token_ttl=60
registration_mode = token
registration_token = s3cret
server_key_path = /etc/keyauth/key.pem
server_key_bits = 2048
challenge_rate_limit = 0
)");
  EXPECT_EQ(c.listen_address, "0.0.0.0:9000");
  EXPECT_EQ(c.data_dir, "/var/lib/keyauth");
  EXPECT_EQ(c.challenge_ttl, 30);
  EXPECT_EQ(c.token_ttl, 60);
  EXPECT_EQ(c.registration_mode, RegistrationMode::kToken);
  EXPECT_EQ(c.registration_token, "s3cret");
  EXPECT_EQ(c.server_key_path, "/etc/keyauth/key.pem");
  EXPECT_EQ(c.server_key_bits, 2048);
  EXPECT_EQ(c.challenge_rate_limit, 0u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("bogus = 1"), std::invalid_argument);
  EXPECT_THROW(parse_config("challenge_ttl = ten"), std::invalid_argument);
  EXPECT_THROW(parse_config("just words"), std::invalid_argument);
  EXPECT_THROW(parse_config("registration_mode = closed"), std::invalid_argument);
}

TEST(Config, ValidationRules) {
  ServerConfig c;
  c.challenge_ttl = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.token_ttl = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.registration_mode = RegistrationMode::kToken;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.registration_token = "t";
  EXPECT_NO_THROW(c.validate());
  c = {};
  c.server_key_bits = 1024;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.data_dir = "/srv/data";
  c.server_key_path = "/srv/data/key.pem";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.listen_address = "nocolon";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.listen_address = "h:70000";
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, EnvironmentOverrides) {
  const std::map<std::string, std::string> env = {
      {"KEYAUTH_LISTEN", "127.0.0.1:0"},  {"KEYAUTH_DATA_DIR", "/d"},
      {"KEYAUTH_CHALLENGE_TTL", "1"},     {"KEYAUTH_TOKEN_TTL", "2"},
      {"KEYAUTH_REG_MODE", "token"},      {"KEYAUTH_REG_TOKEN", "tok"},
      {"KEYAUTH_SERVER_KEY", "/k.pem"}};
  ServerConfig c = parse_config("challenge_ttl = 50\ntoken_ttl = 70");
  apply_env_overrides(c, [&](const char* name) -> std::optional<std::string> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  EXPECT_EQ(c.listen_address, "127.0.0.1:0");
  EXPECT_EQ(c.data_dir, "/d");
  EXPECT_EQ(c.challenge_ttl, 1);
  EXPECT_EQ(c.token_ttl, 2);
  EXPECT_EQ(c.registration_mode, RegistrationMode::kToken);
  EXPECT_EQ(c.registration_token, "tok");
  EXPECT_EQ(c.server_key_path, "/k.pem");
}

TEST(Config, BadEnvironmentValueNamesVariable) {
  ServerConfig c;
  try {
    apply_env_overrides(c, [](const char* name) -> std::optional<std::string> {
      if (std::string(name) == "KEYAUTH_TOKEN_TTL") return "soon";
      return std::nullopt;
    });
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("KEYAUTH_TOKEN_TTL"), std::string::npos);
  }
}

}  // namespace
}  // namespace keyauth::server
