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

#include "keyauth/rp_sdk.h"

#include <algorithm>
#include <mutex>
#include <thread>

#include "keyauth/protocol.h"
#include "keyauth/token.h"

namespace keyauth::rp {
namespace {

using namespace keyauth::protocol;
using std::chrono::system_clock;

Message call(const RpSession& session, std::string_view path, const Message& request) {
  Message reply;
  try {
    reply = exchange(session.transport(), path, request);
  } catch (const NetworkError& e) {
    throw RpError(Errc::kNetworkError, e.what());
  } catch (const ProtocolError& e) {
    throw RpError(Errc::kServerError,
                  std::string("unreadable server reply: ") + e.what());
  }
  if (const auto* err = std::get_if<ErrorReply>(&reply)) {
    const std::string what = std::string(to_string(err->code)) + ": " + err->message;
    switch (err->code) {
      case ErrorCode::kUnknownUser: throw RpError(Errc::kUnknownUser, what);
      case ErrorCode::kUnauthorized: throw RpError(Errc::kUnauthorized, what);
      case ErrorCode::kExpired: throw RpError(Errc::kExpired, what);
      default: throw RpError(Errc::kServerError, what);
    }
  }
  return reply;
}

template <typename T>
T expect_reply(Message reply) {
  if (auto* m = std::get_if<T>(&reply)) return std::move(*m);
  throw RpError(Errc::kServerError,
                "unexpected reply " + std::string(message_type(reply)));
}

std::int64_t to_unix(system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

AuthenticatedUser verify_offline(const RpSession& session, const crypto::PublicKey& key,
                                 std::string_view token) {
  const TokenCheck check = check_token(key, token, to_unix(session.now()));
  switch (check.status) {
    case TokenStatus::kValid:
      return {check.claims->user_id, check.claims->service_id, check.claims->expires_at};
    case TokenStatus::kExpired:
      throw RpError(Errc::kExpiredToken, "token expired");
    case TokenStatus::kMalformed:
    case TokenStatus::kBadSignature:
      break;
  }
  throw RpError(Errc::kInvalidToken, "token rejected: " + std::string(to_string(check.status)));
}

AuthenticatedUser verify_remote(const RpSession& session, std::string_view token) {
  const auto result = expect_reply<VerifyResult>(
      call(session, "/v1/verify", VerifyRequest{std::string(token)}));
  if (result.valid && result.user_id && result.service_id && result.expires_at) {
    return {*result.user_id, *result.service_id, *result.expires_at};
  }
  if (result.reason && *result.reason == to_string(TokenStatus::kExpired)) {
    throw RpError(Errc::kExpiredToken, "token expired");
  }
  throw RpError(Errc::kInvalidToken, "token rejected: " + result.reason.value_or("invalid"));
}

}  // namespace

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kUnknownUser: return "unknown-user";
    case Errc::kNetworkError: return "network-error";
    case Errc::kExpired: return "expired";
    case Errc::kTimeout: return "timeout";
    case Errc::kUnauthorized: return "unauthorized";
    case Errc::kInvalidToken: return "invalid-token";
    case Errc::kExpiredToken: return "expired-token";
    case Errc::kTokenAlreadyDelivered: return "token-already-delivered";
    case Errc::kServerError: return "server-error";
  }
  return "server-error";
}

struct RpSession::KeyCache {
  mutable std::mutex mu;
  std::optional<CachedKey> key;
};

RpSession::RpSession(std::string server_url, VerifyMode mode)
    : RpSession(std::make_shared<HttpTransport>(std::move(server_url)), mode) {}

RpSession::RpSession(std::shared_ptr<Transport> transport, VerifyMode mode,
                     WallClock clock)
    : transport_(std::move(transport)),
      mode_(mode),
      clock_(std::move(clock)),
      cache_(std::make_shared<KeyCache>()) {
  if (!transport_) throw std::invalid_argument("RpSession needs a transport");
  if (mode_ == VerifyMode::kOffline) {
    throw std::invalid_argument("offline sessions are created with RpSession::offline");
  }
}

RpSession RpSession::offline(std::shared_ptr<Transport> transport,
                             std::string_view server_key_pem, WallClock clock) {
  RpSession session(std::move(transport), VerifyMode::kRemote, std::move(clock));
  session.mode_ = VerifyMode::kOffline;
  session.cache_->key = CachedKey{std::string(server_key_pem),
                                  crypto::PublicKey::from_pem(server_key_pem),
                                  session.now()};
  return session;
}

void RpSession::refresh_server_key() const {
  HttpResponse response;
  try {
    response = transport_->get("/v1/server-key");
  } catch (const NetworkError& e) {
    throw RpError(Errc::kNetworkError, e.what());
  }
  if (response.status != 200) {
    throw RpError(Errc::kServerError,
                  "server-key request failed with HTTP " + std::to_string(response.status));
  }
  CachedKey fresh{response.body, crypto::PublicKey::from_pem(response.body), now()};
  std::lock_guard lock(cache_->mu);
  cache_->key = std::move(fresh);
}

std::optional<RpSession::CachedKey> RpSession::cached_server_key() const {
  std::lock_guard lock(cache_->mu);
  return cache_->key;
}

PendingAuth begin_auth(const RpSession& session, std::string_view user_id,
                       std::string_view service_id) {
  const auto reply = expect_reply<ChallengeReply>(call(
      session, "/v1/challenge",
      ChallengeRequest{std::string(user_id), std::string(service_id)}));
  return PendingAuth{reply.challenge_id, reply.nonce, reply.expires_at, reply.poll_secret};
}

std::string await_completion(const RpSession& session, const PendingAuth& pending,
                             const AwaitOptions& options) {
  const system_clock::time_point deadline =
      options.deadline.value_or(system_clock::time_point(std::chrono::seconds(pending.expires_at)));
  const auto interval = std::max(options.poll_interval, std::chrono::milliseconds(1));
  const PollRequest request{pending.challenge_id, pending.poll_secret};

  for (;;) {
    const auto reply = expect_reply<PollReply>(call(session, "/v1/poll", request));
    switch (reply.status) {
      case PollStatus::kCompleted:
        if (!reply.token) {
          throw RpError(Errc::kTokenAlreadyDelivered,
                        "challenge completed but its token was already collected");
        }
        return *reply.token;
      case PollStatus::kExpired:
        throw RpError(Errc::kExpired, "challenge expired before it was answered");
      case PollStatus::kPending:
        break;
    }
    const auto now = system_clock::now();
    if (now >= deadline) throw RpError(Errc::kTimeout, "gave up waiting for approval");
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now) +
                      std::chrono::milliseconds(1);
    std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(interval, left));
  }
}

AuthenticatedUser complete_auth(const RpSession& session, std::string_view token) {
  switch (session.mode()) {
    case VerifyMode::kOffline: {
      const auto cached = session.cached_server_key();
      if (!cached) throw RpError(Errc::kInvalidToken, "no server key cached");
      return verify_offline(session, cached->key, token);
    }
    case VerifyMode::kRemote:
      return verify_remote(session, token);
    case VerifyMode::kAuto:
      break;
  }
  const auto cached = session.cached_server_key();
  if (cached && session.now() - cached->fetched_at < kServerKeyMaxAge) {
    return verify_offline(session, cached->key, token);
  }
  AuthenticatedUser user = verify_remote(session, token);
  try {
    session.refresh_server_key();
  } catch (const RpError&) {
    // The identity is already established; the cache is refilled next time.
  }
  return user;
}

}  // namespace keyauth::rp
