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

#include "keyauth/server/config.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <stdexcept>

#include "../file_util.h"
#include "keyauth/crypto.h"

namespace keyauth::server {
namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument(std::string(key) + ": not an integer: " +
                                std::string(value));
  }
  return out;
}

RegistrationMode parse_mode(std::string_view value) {
  if (value == "open") return RegistrationMode::kOpen;
  if (value == "token") return RegistrationMode::kToken;
  throw std::invalid_argument("registration_mode must be open or token, got " +
                              std::string(value));
}

void set_field(ServerConfig& c, std::string_view key, std::string_view value) {
  if (key == "listen") {
    c.listen_address = value;
  } else if (key == "data_dir") {
    c.data_dir = std::string(value);
  } else if (key == "challenge_ttl") {
    c.challenge_ttl = parse_int<std::int64_t>(key, value);
  } else if (key == "token_ttl") {
    c.token_ttl = parse_int<std::int64_t>(key, value);
  } else if (key == "registration_mode") {
    c.registration_mode = parse_mode(value);
  } else if (key == "registration_token") {
    c.registration_token = value;
  } else if (key == "server_key_path") {
    c.server_key_path = std::string(value);
  } else if (key == "server_key_bits") {
    c.server_key_bits = parse_int<int>(key, value);
  } else if (key == "challenge_rate_limit") {
    c.challenge_rate_limit = parse_int<unsigned>(key, value);
  } else {
    throw std::invalid_argument("unknown setting " + std::string(key));
  }
}

fs::path normalized(const fs::path& p) {
  return fs::absolute(p).lexically_normal();
}

bool is_within(const fs::path& child, const fs::path& dir) {
  const fs::path c = normalized(child);
  fs::path d = normalized(dir);
  if (d.has_filename() == false) d = d.parent_path();
  auto [dir_end, _] = std::mismatch(d.begin(), d.end(), c.begin(), c.end());
  return dir_end == d.end();
}

}  // namespace

void ServerConfig::validate() const {
  if (challenge_ttl <= 0) throw std::invalid_argument("challenge_ttl must be positive");
  if (token_ttl <= 0) throw std::invalid_argument("token_ttl must be positive");
  if (registration_mode == RegistrationMode::kToken && registration_token.empty()) {
    throw std::invalid_argument("registration_token is required in token mode");
  }
  if (!crypto::is_supported_modulus(server_key_bits)) {
    throw std::invalid_argument("server_key_bits must be 2048, 3072 or 4096");
  }
  if (data_dir.empty()) throw std::invalid_argument("data_dir must be set");
  if (server_key_path.empty()) throw std::invalid_argument("server_key_path must be set");
  if (is_within(server_key_path, data_dir)) {
    throw std::invalid_argument(
        "server_key_path must not be inside data_dir; data_dir holds public "
        "material only");
  }
  (void)host();
  (void)port();
}

std::string ServerConfig::host() const {
  const auto colon = listen_address.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw std::invalid_argument("listen must be host:port, got " + listen_address);
  }
  return listen_address.substr(0, colon);
}

int ServerConfig::port() const {
  const auto colon = listen_address.rfind(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("listen must be host:port, got " + listen_address);
  }
  const int port = parse_int<int>("listen", std::string_view(listen_address).substr(colon + 1));
  if (port < 0 || port > 65535) throw std::invalid_argument("listen port out of range");
  return port;
}

ServerConfig parse_config(std::string_view text, ServerConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    try {
      set_field(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ServerConfig load_config_file(const fs::path& path, ServerConfig base) {
  return parse_config(internal::read_file(path), std::move(base));
}

void apply_env_overrides(ServerConfig& config, const EnvLookup& lookup) {
  EnvLookup get = lookup ? lookup : [](const char* name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name)) return std::string(v);
    return std::nullopt;
  };
  static constexpr std::pair<const char*, const char*> kVars[] = {
      {"KEYAUTH_LISTEN", "listen"},
      {"KEYAUTH_DATA_DIR", "data_dir"},
      {"KEYAUTH_CHALLENGE_TTL", "challenge_ttl"},
      {"KEYAUTH_TOKEN_TTL", "token_ttl"},
      {"KEYAUTH_REG_MODE", "registration_mode"},
      {"KEYAUTH_REG_TOKEN", "registration_token"},
      {"KEYAUTH_SERVER_KEY", "server_key_path"},
  };
  for (const auto& [var, key] : kVars) {
    if (auto value = get(var)) {
      try {
        set_field(config, key, trim(*value));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(var) + ": " + e.what());
      }
    }
  }
}

}  // namespace keyauth::server
