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

#include "keyauth/server/key_registry.h"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>

#include "../file_util.h"

namespace keyauth::server {
namespace {

using json = nlohmann::json;

std::string_view status_name(KeyStatus s) {
  return s == KeyStatus::kActive ? "active" : "replaced";
}

KeyRecord parse_record(const std::string& line, std::size_t line_no) {
  auto fail = [&](const std::string& what) -> KeyRecord {
    throw std::runtime_error("registry line " + std::to_string(line_no) + ": " + what);
  };
  json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return fail("not a JSON object");
  try {
    KeyRecord r;
    r.user_id = doc.at("user_id").get<std::string>();
    r.public_key_pem = doc.at("public_key_pem").get<std::string>();
    auto fp = Fingerprint::from_base64url(doc.at("fingerprint").get<std::string>());
    if (!fp) return fail("bad fingerprint");
    r.fingerprint = *fp;
    r.created_at = doc.at("created_at").get<std::int64_t>();
    const std::string status = doc.at("status").get<std::string>();
    if (status == "active") {
      r.status = KeyStatus::kActive;
    } else if (status == "replaced") {
      r.status = KeyStatus::kReplaced;
    } else {
      return fail("bad status " + status);
    }
    return r;
  } catch (const json::exception& e) {
    return fail(e.what());
  }
}

}  // namespace

KeyRegistry::KeyRegistry(std::filesystem::path file) : file_(std::move(file)) {
  std::error_code ec;
  if (!std::filesystem::exists(file_, ec)) return;

  std::istringstream in(internal::read_file(file_));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    KeyRecord record = parse_record(line, line_no);
    if (record.status == KeyStatus::kActive) {
      crypto::PublicKey key = crypto::PublicKey::from_pem(record.public_key_pem);
      if (!(crypto::fingerprint(key) == record.fingerprint)) {
        throw std::runtime_error("registry line " + std::to_string(line_no) +
                                 ": fingerprint does not match key");
      }
      if (active_.count(record.user_id)) {
        throw std::runtime_error("registry has two active keys for " + record.user_id);
      }
      active_.emplace(record.user_id, ActiveKey{record, std::move(key)});
    }
    records_.push_back(std::move(record));
  }
}

std::string KeyRegistry::serialize(const std::vector<KeyRecord>& records) const {
  std::string out;
  for (const KeyRecord& r : records) {
    const json line = {
        {"user_id", r.user_id},
        {"public_key_pem", r.public_key_pem},
        {"fingerprint", r.fingerprint.to_base64url()},
        {"created_at", r.created_at},
        {"status", status_name(r.status)},
    };
    out += line.dump();
    out += '\n';
  }
  return out;
}

KeyRecord KeyRegistry::register_key(std::string_view user_id,
                                    const crypto::PublicKey& key,
                                    std::int64_t now) {
  KeyRecord record{std::string(user_id), key.to_pem(), crypto::fingerprint(key),
                   now, KeyStatus::kActive};

  // Writers are serialized by write_mu_, so the copy below can not go stale
  // before it is swapped in.
  std::lock_guard write_lock(write_mu_);
  std::vector<KeyRecord> next;
  {
    std::shared_lock read_lock(mu_);
    next = records_;
  }
  for (KeyRecord& r : next) {
    if (r.user_id == user_id && r.status == KeyStatus::kActive) {
      r.status = KeyStatus::kReplaced;
    }
  }
  next.push_back(record);
  internal::atomic_write_file(file_, serialize(next), 0600);

  std::unique_lock lock(mu_);
  records_ = std::move(next);
  active_.insert_or_assign(record.user_id, ActiveKey{record, key});
  return record;
}

std::optional<ActiveKey> KeyRegistry::find_active(std::string_view user_id) const {
  std::shared_lock lock(mu_);
  auto it = active_.find(std::string(user_id));
  if (it == active_.end()) return std::nullopt;
  return it->second;
}

std::vector<KeyRecord> KeyRegistry::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

}  // namespace keyauth::server
