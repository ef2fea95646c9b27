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

// Relying-party library. An application hands authentication to a KeyAuth
// server with three calls:
//
//   auto pending = rp::begin_auth(session, "alice", "mail");
//   // show pending.challenge_id / pending.nonce to the user, keep the
//   // poll secret server side
//   std::string token = rp::await_completion(session, pending);
//   rp::AuthenticatedUser who = rp::complete_auth(session, token);
//
// The library only ever sees identities and tokens, never user secrets.

#ifndef KEYAUTH_RP_SDK_H_
#define KEYAUTH_RP_SDK_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "keyauth/bytes.h"
#include "keyauth/crypto.h"
#include "keyauth/transport.h"

namespace keyauth::rp {

enum class Errc {
  kUnknownUser,
  kNetworkError,
  kExpired,
  kTimeout,
  kUnauthorized,
  kInvalidToken,
  kExpiredToken,
  // The token was already collected by an earlier poll.
  kTokenAlreadyDelivered,
  // Any other server error code; the message names it.
  kServerError,
};

std::string_view to_string(Errc code);

class RpError : public std::runtime_error {
 public:
  RpError(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class VerifyMode {
  // Only the cached server key; no network.
  kOffline,
  // Always ask the server's /v1/verify endpoint.
  kRemote,
  // Offline while the cached key is younger than 24 h, otherwise remote,
  // refreshing the cache afterwards.
  kAuto,
};

inline constexpr std::chrono::hours kServerKeyMaxAge{24};

// Connection settings plus the cached server key. Copies share the key
// cache, which is internally synchronized, so a session can be used from
// several threads.
class RpSession {
 public:
  using WallClock = std::function<std::chrono::system_clock::time_point()>;

  // Remote or auto mode against `server_url`, speaking plain HTTP.
  explicit RpSession(std::string server_url, VerifyMode mode = VerifyMode::kAuto);

  // Any mode over a caller-supplied transport.
  RpSession(std::shared_ptr<Transport> transport, VerifyMode mode,
            WallClock clock = std::chrono::system_clock::now);

  // Offline mode needs a key up front.
  static RpSession offline(std::shared_ptr<Transport> transport,
                           std::string_view server_key_pem,
                           WallClock clock = std::chrono::system_clock::now);

  VerifyMode mode() const { return mode_; }
  Transport& transport() const { return *transport_; }
  std::chrono::system_clock::time_point now() const { return clock_(); }

  // Fetches GET /v1/server-key into the shared cache.
  void refresh_server_key() const;

  struct CachedKey {
    std::string pem;
    crypto::PublicKey key;
    std::chrono::system_clock::time_point fetched_at;
  };
  std::optional<CachedKey> cached_server_key() const;

 private:
  struct KeyCache;

  std::shared_ptr<Transport> transport_;
  VerifyMode mode_;
  WallClock clock_;
  std::shared_ptr<KeyCache> cache_;
};

struct PendingAuth {
  ChallengeId challenge_id;
  Nonce nonce;
  std::int64_t expires_at = 0;
  PollSecret poll_secret;
};

// Errors: kUnknownUser, kNetworkError, kServerError.
PendingAuth begin_auth(const RpSession& session, std::string_view user_id,
                       std::string_view service_id);

struct AwaitOptions {
  std::chrono::milliseconds poll_interval{1000};
  // Defaults to the challenge's expires_at.
  std::optional<std::chrono::system_clock::time_point> deadline;
};

// Polls, one request per interval, until the token arrives. Errors:
// kExpired, kTimeout, kUnauthorized, kTokenAlreadyDelivered, kNetworkError.
std::string await_completion(const RpSession& session, const PendingAuth& pending,
                             const AwaitOptions& options = {});

struct AuthenticatedUser {
  std::string user_id;
  std::string service_id;
  std::int64_t expires_at = 0;

  bool operator==(const AuthenticatedUser&) const = default;
};

// Errors: kInvalidToken, kExpiredToken, kNetworkError (remote only).
AuthenticatedUser complete_auth(const RpSession& session, std::string_view token);

}  // namespace keyauth::rp

#endif  // KEYAUTH_RP_SDK_H_
