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

#include "keyauth/server/challenge_store.h"

#include <cstring>

namespace keyauth::server {

std::size_t ChallengeStore::IdHash::operator()(const ChallengeId& id) const noexcept {
  // Ids are uniformly random; any 8 bytes make a good hash.
  std::size_t h = 0;
  std::memcpy(&h, id.view().data(), sizeof(h));
  return h;
}

bool ChallengeStore::insert(PendingChallenge challenge) {
  std::lock_guard lock(mu_);
  const ChallengeId id = challenge.challenge_id;
  return challenges_.emplace(id, std::move(challenge)).second;
}

std::optional<PendingChallenge> ChallengeStore::find(const ChallengeId& id) const {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(id);
  if (it == challenges_.end()) return std::nullopt;
  return it->second;
}

ClaimOutcome ChallengeStore::claim(const ChallengeId& id, std::int64_t now) {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(id);
  if (it == challenges_.end()) return ClaimOutcome::kUnknown;
  PendingChallenge& c = it->second;
  switch (c.state) {
    case ChallengeState::kConsumed:
      return ClaimOutcome::kAlreadyConsumed;
    case ChallengeState::kExpired:
      return ClaimOutcome::kExpired;
    case ChallengeState::kPending:
      break;
  }
  if (now >= c.expires_at) {
    c.state = ChallengeState::kExpired;
    return ClaimOutcome::kExpired;
  }
  c.state = ChallengeState::kConsumed;
  c.consumed_at = now;
  return ClaimOutcome::kClaimed;
}

void ChallengeStore::attach_token(const ChallengeId& id, std::string token) {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(id);
  if (it != challenges_.end() && it->second.state == ChallengeState::kConsumed) {
    it->second.result_token = std::move(token);
  }
}

PollResult ChallengeStore::poll(const ChallengeId& id, const PollSecret& secret,
                                std::int64_t now) {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(id);
  if (it == challenges_.end()) return {PollOutcome::kUnknown, std::nullopt};
  PendingChallenge& c = it->second;
  if (!constant_time_equal(c.poll_secret.view(), secret.view())) {
    return {PollOutcome::kUnauthorized, std::nullopt};
  }
  switch (c.state) {
    case ChallengeState::kPending:
      if (now >= c.expires_at) {
        c.state = ChallengeState::kExpired;
        return {PollOutcome::kExpired, std::nullopt};
      }
      return {PollOutcome::kPending, std::nullopt};
    case ChallengeState::kExpired:
      return {PollOutcome::kExpired, std::nullopt};
    case ChallengeState::kConsumed:
      break;
  }
  if (!c.result_token) return {PollOutcome::kPending, std::nullopt};
  if (c.token_delivered) return {PollOutcome::kCompleted, std::nullopt};
  c.token_delivered = true;
  return {PollOutcome::kCompleted, c.result_token};
}

std::size_t ChallengeStore::evict_expired(std::int64_t now,
                                          const EvictionPolicy& policy) {
  std::lock_guard lock(mu_);
  std::size_t expired = 0;
  for (auto it = challenges_.begin(); it != challenges_.end();) {
    PendingChallenge& c = it->second;
    bool drop = false;
    switch (c.state) {
      case ChallengeState::kPending:
        if (c.expires_at <= now) {
          c.state = ChallengeState::kExpired;
          ++expired;
        }
        break;
      case ChallengeState::kConsumed:
        drop = now >= c.consumed_at + policy.consumed_retention;
        break;
      case ChallengeState::kExpired:
        drop = now >= c.expires_at + policy.expired_retention;
        break;
    }
    it = drop ? challenges_.erase(it) : std::next(it);
  }
  return expired;
}

std::size_t ChallengeStore::size() const {
  std::lock_guard lock(mu_);
  return challenges_.size();
}

}  // namespace keyauth::server
