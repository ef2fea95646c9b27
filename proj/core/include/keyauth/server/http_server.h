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

// HTTP/1.1 binding of the service:
//
//   POST /v1/register       register-request  -> register-result
//   POST /v1/challenge      challenge-request -> challenge-reply
//   POST /v1/authenticate   auth-submission   -> auth-result
//   POST /v1/poll           poll-request      -> poll-reply
//   POST /v1/verify         verify-request    -> verify-result
//   GET  /v1/server-key     PEM text of the token-signing public key
//
// Successful replies use status 200. Failures carry an ErrorReply with the
// status given by http_status(ErrorCode).

#ifndef KEYAUTH_SERVER_HTTP_SERVER_H_
#define KEYAUTH_SERVER_HTTP_SERVER_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "keyauth/server/service.h"

namespace keyauth::server {

struct HttpReply {
  int status = 200;
  std::string content_type;
  std::string body;
};

// Fixed one-minute window per client address.
class RateLimiter {
 public:
  // 0 disables limiting.
  explicit RateLimiter(unsigned per_minute) : per_minute_(per_minute) {}

  bool allow(const std::string& client, std::int64_t now);

 private:
  struct Window {
    std::int64_t start = 0;
    unsigned count = 0;
  };

  unsigned per_minute_;
  std::mutex mu_;
  std::unordered_map<std::string, Window> windows_;
};

// Routes one HTTP request to `service`. Transport-free so routing can be
// tested without sockets.
HttpReply route_request(Service& service, RateLimiter& limiter,
                        std::string_view method, std::string_view path,
                        std::string_view body, const std::string& client);

class HttpServer {
 public:
  // Does not take ownership of `service`, which must outlive the server.
  HttpServer(Service& service, std::string host, int port);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port), then serves on background threads
  // and evicts expired challenges once a second. Returns the bound port.
  // Throws std::runtime_error if binding fails.
  int start();

  // Blocks serving on the calling thread until stop() is called.
  void run();

  void stop();

  int port() const;
  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace keyauth::server

#endif  // KEYAUTH_SERVER_HTTP_SERVER_H_
