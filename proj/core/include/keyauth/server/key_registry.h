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

#ifndef KEYAUTH_SERVER_KEY_REGISTRY_H_
#define KEYAUTH_SERVER_KEY_REGISTRY_H_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "keyauth/bytes.h"
#include "keyauth/crypto.h"

namespace keyauth::server {

enum class KeyStatus { kActive, kReplaced };

// Binding of a user to a public key. Public material only.
struct KeyRecord {
  std::string user_id;
  std::string public_key_pem;
  Fingerprint fingerprint;
  std::int64_t created_at = 0;
  KeyStatus status = KeyStatus::kActive;

  bool operator==(const KeyRecord&) const = default;
};

struct ActiveKey {
  KeyRecord record;
  crypto::PublicKey key;
};

// Registry of user keys persisted as one JSON object per line. Every change
// rewrites the file with an atomic write-rename before it becomes visible
// to readers. Reads run concurrently; writes are serialized.
class KeyRegistry {
 public:
  // Loads `file` if it exists. Throws std::runtime_error on a corrupt file.
  explicit KeyRegistry(std::filesystem::path file);

  KeyRegistry(const KeyRegistry&) = delete;
  KeyRegistry& operator=(const KeyRegistry&) = delete;

  // Makes `key` the user's only active key; a previous active record becomes
  // kReplaced. Durable on return.
  KeyRecord register_key(std::string_view user_id, const crypto::PublicKey& key,
                         std::int64_t now);

  std::optional<ActiveKey> find_active(std::string_view user_id) const;

  std::vector<KeyRecord> records() const;

  const std::filesystem::path& file() const { return file_; }

 private:
  std::string serialize(const std::vector<KeyRecord>& records) const;

  std::filesystem::path file_;
  std::mutex write_mu_;
  mutable std::shared_mutex mu_;
  std::vector<KeyRecord> records_;
  std::unordered_map<std::string, ActiveKey> active_;
};

}  // namespace keyauth::server

#endif  // KEYAUTH_SERVER_KEY_REGISTRY_H_
