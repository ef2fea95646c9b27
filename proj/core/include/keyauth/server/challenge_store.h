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

#ifndef KEYAUTH_SERVER_CHALLENGE_STORE_H_
#define KEYAUTH_SERVER_CHALLENGE_STORE_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "keyauth/bytes.h"

namespace keyauth::server {

// pending -> consumed and pending -> expired are the only transitions.
enum class ChallengeState { kPending, kConsumed, kExpired };

struct PendingChallenge {
  ChallengeId challenge_id;
  Nonce nonce;
  std::string user_id;
  std::string service_id;
  PollSecret poll_secret;
  std::int64_t issued_at = 0;
  std::int64_t expires_at = 0;
  ChallengeState state = ChallengeState::kPending;

  // Set once the challenge is consumed and its token minted.
  std::optional<std::string> result_token;
  std::int64_t consumed_at = 0;
  bool token_delivered = false;
};

enum class ClaimOutcome { kClaimed, kUnknown, kAlreadyConsumed, kExpired };

enum class PollOutcome { kUnknown, kUnauthorized, kPending, kExpired, kCompleted };

struct PollResult {
  PollOutcome outcome = PollOutcome::kUnknown;
  // Only on the first kCompleted poll after the token was attached.
  std::optional<std::string> token;
};

// In-memory store of issued challenges. All transitions happen under one
// mutex, so a challenge is consumed by exactly one caller.
class ChallengeStore {
 public:
  ChallengeStore() = default;
  ChallengeStore(const ChallengeStore&) = delete;
  ChallengeStore& operator=(const ChallengeStore&) = delete;

  // Returns false if the id is already present.
  bool insert(PendingChallenge challenge);

  std::optional<PendingChallenge> find(const ChallengeId& id) const;

  // Moves a live pending challenge to consumed. A pending challenge whose
  // expiry has passed is moved to expired instead.
  ClaimOutcome claim(const ChallengeId& id, std::int64_t now);

  void attach_token(const ChallengeId& id, std::string token);

  // Compares the poll secret in constant time. A completed challenge hands
  // its token out once; a claimed challenge whose token is still being
  // minted reports kPending.
  PollResult poll(const ChallengeId& id, const PollSecret& secret, std::int64_t now);

  struct EvictionPolicy {
    // How long consumed challenges stay answerable (already-consumed).
    std::int64_t consumed_retention = 900;
    // How long expired challenges keep answering "expired".
    std::int64_t expired_retention = 120;
  };

  // Expires every pending challenge with expires_at <= now and drops
  // terminal challenges past their retention. Returns the number of
  // challenges that moved from pending to expired.
  std::size_t evict_expired(std::int64_t now, const EvictionPolicy& policy);

  std::size_t size() const;

 private:
  struct IdHash {
    std::size_t operator()(const ChallengeId& id) const noexcept;
  };

  mutable std::mutex mu_;
  std::unordered_map<ChallengeId, PendingChallenge, IdHash> challenges_;
};

}  // namespace keyauth::server

#endif  // KEYAUTH_SERVER_CHALLENGE_STORE_H_
