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

#ifndef KEYAUTH_SERVER_SERVICE_H_
#define KEYAUTH_SERVER_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "keyauth/clock.h"
#include "keyauth/crypto.h"
#include "keyauth/protocol.h"
#include "keyauth/server/challenge_store.h"
#include "keyauth/server/config.h"
#include "keyauth/server/key_registry.h"
#include "keyauth/token.h"

namespace keyauth::server {

// Loads the daemon's signing key from `path`, generating and writing it
// (mode 0600) on first use.
crypto::KeyPair load_or_create_server_key(const std::filesystem::path& path,
                                          int bits);

// The authentication service independent of any transport. Each call is a
// complete request; nothing is tied to the connection it arrived on.
//
// Operations report protocol failures by throwing ProtocolError carrying
// exactly one wire error code.
class Service {
 public:
  Service(ServerConfig config, crypto::KeyPair server_key, Clock clock = unix_now);

  // Validates `config`, creates data_dir, and loads or creates the server key.
  static std::unique_ptr<Service> open(const ServerConfig& config,
                                       Clock clock = unix_now);

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Errors: unauthorized, invalid-key, id-format.
  protocol::RegisterResult register_key(const protocol::RegisterRequest& req);

  // Errors: unknown-user, id-format.
  protocol::ChallengeReply issue_challenge(const protocol::ChallengeRequest& req);

  // Checks, in this order: the challenge exists (unknown-challenge), is still
  // pending (already-consumed / expired), has not expired (expired), names
  // the user's active key (unknown-key) and carries a valid signature
  // (bad-signature). Success consumes the challenge exactly once.
  protocol::AuthResult submit_response(const protocol::AuthSubmission& sub);

  // Errors: unknown-challenge, unauthorized.
  protocol::PollReply poll_challenge(const protocol::PollRequest& req);

  // Never throws for bad tokens; they come back with valid = false.
  protocol::VerifyResult verify_token(const protocol::VerifyRequest& req) const;

  // Expires stale pending challenges and forgets consumed or expired ones
  // token_ttl after they ended. Returns the number newly expired.
  std::size_t evict_expired(std::int64_t now);
  std::size_t evict_expired() { return evict_expired(clock_()); }

  // Dispatches a decoded request to the matching operation and converts
  // ProtocolError into an ErrorReply.
  protocol::Message handle(const protocol::Message& request);

  std::string server_key_pem() const { return server_key_pem_; }
  const crypto::PublicKey& server_public_key() const { return server_key_.public_key; }
  Fingerprint server_key_fingerprint() const { return server_fingerprint_; }

  const ServerConfig& config() const { return config_; }
  const KeyRegistry& registry() const { return registry_; }
  const ChallengeStore& challenges() const { return challenges_; }

  // Called for every minted token, after it is stored.
  void set_mint_observer(std::function<void(const TokenClaims&)> observer) {
    mint_observer_ = std::move(observer);
  }

 private:
  ServerConfig config_;
  crypto::KeyPair server_key_;
  std::string server_key_pem_;
  Fingerprint server_fingerprint_;
  Clock clock_;
  KeyRegistry registry_;
  ChallengeStore challenges_;
  std::function<void(const TokenClaims&)> mint_observer_;
};

}  // namespace keyauth::server

#endif  // KEYAUTH_SERVER_SERVICE_H_
