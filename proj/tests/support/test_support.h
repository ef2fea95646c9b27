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

#ifndef KEYAUTH_TESTS_SUPPORT_TEST_SUPPORT_H_
#define KEYAUTH_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "keyauth/clock.h"
#include "keyauth/crypto.h"
#include "keyauth/protocol.h"
#include "keyauth/server/http_server.h"
#include "keyauth/server/service.h"
#include "keyauth/transport.h"

namespace keyauth::testing {

// Directory holding the committed fixture keys.
std::filesystem::path data_path(const std::string& name);

std::string read_text(const std::filesystem::path& path);

// Removed with its contents on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Process-wide 2048-bit key pairs, generated once. Index selects a distinct
// pair.
const crypto::KeyPair& test_keypair(int index);

class FakeClock {
 public:
  explicit FakeClock(std::int64_t start = 1'700'000'000) : now_(start) {}
  std::int64_t now() const { return now_.load(); }
  void advance(std::int64_t seconds) { now_ += seconds; }
  Clock fn() {
    return [this] { return now_.load(); };
  }

 private:
  std::atomic<std::int64_t> now_;
};

// Calls route_request directly; no sockets.
class InProcessTransport : public Transport {
 public:
  explicit InProcessTransport(server::Service& service);
  HttpResponse post(std::string_view path, const std::string& body) override;
  HttpResponse get(std::string_view path) override;

 private:
  server::Service& service_;
  server::RateLimiter limiter_{0};
};

// Forwards to another transport and keeps every request and response.
class RecordingTransport : public Transport {
 public:
  struct Exchange {
    std::string method;
    std::string path;
    std::string request;
    std::string response;
  };

  explicit RecordingTransport(Transport& inner) : inner_(inner) {}
  HttpResponse post(std::string_view path, const std::string& body) override;
  HttpResponse get(std::string_view path) override;

  std::vector<Exchange> exchanges() const;
  std::size_t count(std::string_view path) const;
  std::size_t calls() const;

 private:
  Transport& inner_;
  mutable std::mutex mu_;
  std::vector<Exchange> log_;
};

// A Service over a fresh data directory with a fixed server key.
struct ServiceFixture {
  explicit ServiceFixture(server::ServerConfig config = {});

  TempDir dir;
  FakeClock clock;
  server::ServerConfig config;
  std::unique_ptr<server::Service> service;
};

server::ServerConfig test_config(const std::filesystem::path& data_dir);

protocol::RegisterRequest register_request(const std::string& user_id,
                                           const crypto::KeyPair& pair);

// True if `haystack` holds a private-key PEM marker, a 16-byte run of the
// key's PKCS#8 DER, or a 32-character run of its base64 or base64url text.
bool contains_private_material(std::string_view haystack, const crypto::PrivateKey& key);

// Concatenated contents of every regular file under `dir`.
std::string read_tree(const std::filesystem::path& dir);

// Signs the payload for `reply` the way an agent would.
protocol::AuthSubmission sign_submission(const protocol::ChallengeReply& reply,
                                         const std::string& service_id,
                                         const std::string& user_id,
                                         const crypto::KeyPair& pair);

}  // namespace keyauth::testing

#endif  // KEYAUTH_TESTS_SUPPORT_TEST_SUPPORT_H_
