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

#include "keyauth/server/service.h"

#include <system_error>

#include "../file_util.h"

namespace keyauth::server {
namespace {

namespace fs = std::filesystem;
using namespace keyauth::protocol;

constexpr const char* kRegistryFile = "registry.jsonl";

fs::path registry_path(const fs::path& data_dir) {
  internal::ensure_private_directory(data_dir);
  return data_dir / kRegistryFile;
}

void require_id(std::string_view id, const char* field) {
  if (!is_valid_id(id)) {
    throw ProtocolError(ErrorCode::kIdFormat,
                        std::string(field) + " is not a valid identifier");
  }
}

}  // namespace

crypto::KeyPair load_or_create_server_key(const fs::path& path, int bits) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    crypto::KeyPair pair = crypto::generate_keypair(bits);
    internal::ensure_private_directory(path.parent_path());
    try {
      const SecretString pem = pair.private_key.to_pkcs8_pem();
      internal::atomic_create_file(path, std::string_view(pem.data(), pem.size()), 0600);
      return pair;
    } catch (const std::system_error& e) {
      // Another process won the race; use its key.
      if (e.code() != std::errc::file_exists) throw;
    }
  }
  std::string pem = internal::read_file(path);
  crypto::KeyPair pair(crypto::PrivateKey::from_pem(pem));
  secure_zero(pem.data(), pem.size());
  return pair;
}

Service::Service(ServerConfig config, crypto::KeyPair server_key, Clock clock)
    : config_(std::move(config)),
      server_key_(std::move(server_key)),
      server_key_pem_(server_key_.public_key.to_pem()),
      server_fingerprint_(crypto::fingerprint(server_key_.public_key)),
      clock_(std::move(clock)),
      registry_(registry_path(config_.data_dir)) {}

std::unique_ptr<Service> Service::open(const ServerConfig& config, Clock clock) {
  config.validate();
  crypto::KeyPair key =
      load_or_create_server_key(config.server_key_path, config.server_key_bits);
  return std::make_unique<Service>(config, std::move(key), std::move(clock));
}

RegisterResult Service::register_key(const RegisterRequest& req) {
  require_id(req.user_id, "user_id");
  if (config_.registration_mode == RegistrationMode::kToken) {
    const bool ok = req.registration_token &&
                    constant_time_equal(as_bytes(*req.registration_token),
                                        as_bytes(config_.registration_token));
    if (!ok) {
      throw ProtocolError(ErrorCode::kUnauthorized,
                          "registration requires a valid registration token");
    }
  }
  std::optional<crypto::PublicKey> key;
  try {
    key = crypto::PublicKey::from_pem(req.public_key_pem);
  } catch (const crypto::CryptoError& e) {
    throw ProtocolError(ErrorCode::kInvalidKey, e.what());
  }
  const KeyRecord record = registry_.register_key(req.user_id, *key, clock_());
  return RegisterResult{record.user_id, record.fingerprint};
}

ChallengeReply Service::issue_challenge(const ChallengeRequest& req) {
  require_id(req.user_id, "user_id");
  require_id(req.service_id, "service_id");
  if (!registry_.find_active(req.user_id)) {
    throw ProtocolError(ErrorCode::kUnknownUser, "no key registered for " + req.user_id);
  }
  const std::int64_t now = clock_();
  PendingChallenge c;
  c.nonce = Nonce::random();
  c.user_id = req.user_id;
  c.service_id = req.service_id;
  c.poll_secret = PollSecret::random();
  c.issued_at = now;
  c.expires_at = now + config_.challenge_ttl;
  do {
    c.challenge_id = ChallengeId::random();
  } while (!challenges_.insert(c));
  return ChallengeReply{c.challenge_id, c.nonce, c.expires_at, c.poll_secret};
}

AuthResult Service::submit_response(const AuthSubmission& sub) {
  const std::int64_t now = clock_();
  auto challenge = challenges_.find(sub.challenge_id);
  if (!challenge) {
    throw ProtocolError(ErrorCode::kUnknownChallenge, "no such challenge");
  }
  if (challenge->state == ChallengeState::kConsumed) {
    throw ProtocolError(ErrorCode::kAlreadyConsumed, "challenge already used");
  }
  if (challenge->state == ChallengeState::kExpired || now >= challenge->expires_at) {
    throw ProtocolError(ErrorCode::kExpired, "challenge expired");
  }
  auto active = registry_.find_active(challenge->user_id);
  if (!active || !(active->record.fingerprint == sub.fingerprint)) {
    throw ProtocolError(ErrorCode::kUnknownKey,
                        "fingerprint is not the active key of " + challenge->user_id);
  }
  const SigningPayload payload = SigningPayload::build(
      challenge->challenge_id, challenge->nonce, challenge->service_id,
      challenge->user_id);
  if (!crypto::verify(active->key, payload.bytes(), sub.signature)) {
    throw ProtocolError(ErrorCode::kBadSignature, "signature does not verify");
  }

  // The checks above ran without the store lock; claim() re-checks state and
  // expiry atomically so only one submission wins.
  switch (challenges_.claim(sub.challenge_id, now)) {
    case ClaimOutcome::kClaimed:
      break;
    case ClaimOutcome::kAlreadyConsumed:
      throw ProtocolError(ErrorCode::kAlreadyConsumed, "challenge already used");
    case ClaimOutcome::kExpired:
      throw ProtocolError(ErrorCode::kExpired, "challenge expired");
    case ClaimOutcome::kUnknown:
      throw ProtocolError(ErrorCode::kUnknownChallenge, "no such challenge");
  }

  TokenClaims claims{challenge->user_id, challenge->service_id, sub.fingerprint,
                     now, now + config_.token_ttl, TokenId::random()};
  std::string token;
  try {
    token = mint_token(server_key_.private_key, claims);
  } catch (const crypto::CryptoError& e) {
    throw ProtocolError(ErrorCode::kCryptoFailure, e.what());
  }
  challenges_.attach_token(sub.challenge_id, token);
  if (mint_observer_) mint_observer_(claims);
  return AuthResult{std::move(token)};
}

PollReply Service::poll_challenge(const PollRequest& req) {
  const PollResult r = challenges_.poll(req.challenge_id, req.poll_secret, clock_());
  switch (r.outcome) {
    case PollOutcome::kUnknown:
      throw ProtocolError(ErrorCode::kUnknownChallenge, "no such challenge");
    case PollOutcome::kUnauthorized:
      throw ProtocolError(ErrorCode::kUnauthorized, "poll secret mismatch");
    case PollOutcome::kPending:
      return PollReply{PollStatus::kPending, std::nullopt};
    case PollOutcome::kExpired:
      return PollReply{PollStatus::kExpired, std::nullopt};
    case PollOutcome::kCompleted:
      return PollReply{PollStatus::kCompleted, r.token};
  }
  throw ProtocolError(ErrorCode::kUnknownChallenge, "no such challenge");
}

VerifyResult Service::verify_token(const VerifyRequest& req) const {
  const TokenCheck check = check_token(server_key_.public_key, req.token, clock_());
  VerifyResult result;
  if (check.valid()) {
    result.valid = true;
    result.user_id = check.claims->user_id;
    result.service_id = check.claims->service_id;
    result.expires_at = check.claims->expires_at;
  } else {
    result.reason = std::string(to_string(check.status));
  }
  return result;
}

std::size_t Service::evict_expired(std::int64_t now) {
  // Expired challenges stay as long as consumed ones so that a late
  // submission reads "expired" rather than "unknown-challenge", even with a
  // very short challenge_ttl.
  return challenges_.evict_expired(
      now, ChallengeStore::EvictionPolicy{config_.token_ttl, config_.token_ttl});
}

Message Service::handle(const Message& request) {
  try {
    return std::visit(
        [this](const auto& m) -> Message {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, RegisterRequest>) {
            return register_key(m);
          } else if constexpr (std::is_same_v<T, ChallengeRequest>) {
            return issue_challenge(m);
          } else if constexpr (std::is_same_v<T, AuthSubmission>) {
            return submit_response(m);
          } else if constexpr (std::is_same_v<T, PollRequest>) {
            return poll_challenge(m);
          } else if constexpr (std::is_same_v<T, VerifyRequest>) {
            return verify_token(m);
          } else {
            throw ProtocolError(ErrorCode::kSchemaViolation,
                                "not a request message: " +
                                    std::string(message_type(Message(m))));
          }
        },
        request);
  } catch (const ProtocolError& e) {
    return ErrorReply{e.code(), e.what()};
  } catch (const crypto::CryptoError& e) {
    return ErrorReply{ErrorCode::kCryptoFailure, e.what()};
  } catch (const std::system_error& e) {
    return ErrorReply{ErrorCode::kCryptoFailure,
                      std::string("storage failure: ") + e.what()};
  }
}

}  // namespace keyauth::server
