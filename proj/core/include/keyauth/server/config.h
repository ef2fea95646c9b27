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

#ifndef KEYAUTH_SERVER_CONFIG_H_
#define KEYAUTH_SERVER_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace keyauth::server {

enum class RegistrationMode { kOpen, kToken };

struct ServerConfig {
  // host:port
  std::string listen_address = "127.0.0.1:8517";
  std::filesystem::path data_dir = "keyauth-data";
  std::int64_t challenge_ttl = 120;
  std::int64_t token_ttl = 900;
  RegistrationMode registration_mode = RegistrationMode::kOpen;
  std::string registration_token;
  // The daemon's token-signing key. Must live outside data_dir, which only
  // ever holds public material.
  std::filesystem::path server_key_path = "keyauthd-key.pem";
  int server_key_bits = 3072;
  // Challenges per client address per minute; 0 disables the cap.
  unsigned challenge_rate_limit = 30;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  std::string host() const;
  int port() const;
};

// Parses `key = value` lines; `#` starts a comment. Keys mirror the
// ServerConfig fields (listen, data_dir, challenge_ttl, token_ttl,
// registration_mode, registration_token, server_key_path, server_key_bits,
// challenge_rate_limit). Unknown keys and bad values throw
// std::invalid_argument naming the line.
ServerConfig parse_config(std::string_view text, ServerConfig base = {});

ServerConfig load_config_file(const std::filesystem::path& path,
                              ServerConfig base = {});

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

// Applies KEYAUTH_LISTEN, KEYAUTH_DATA_DIR, KEYAUTH_CHALLENGE_TTL,
// KEYAUTH_TOKEN_TTL, KEYAUTH_REG_MODE, KEYAUTH_REG_TOKEN and
// KEYAUTH_SERVER_KEY. The default lookup reads the process environment.
void apply_env_overrides(ServerConfig& config, const EnvLookup& lookup = {});

}  // namespace keyauth::server

#endif  // KEYAUTH_SERVER_CONFIG_H_
