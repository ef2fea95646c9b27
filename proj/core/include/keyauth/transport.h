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

#ifndef KEYAUTH_TRANSPORT_H_
#define KEYAUTH_TRANSPORT_H_

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "keyauth/protocol.h"

namespace keyauth {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// The server could not be reached or the exchange broke off.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Client side of the HTTP binding. Implementations throw NetworkError for
// transport failures; any HTTP status is a successful exchange.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(std::string_view path, const std::string& body) = 0;
  virtual HttpResponse get(std::string_view path) = 0;
};

// Opens a fresh TCP connection for every request; no state is carried
// between calls.
class HttpTransport : public Transport {
 public:
  // `base_url` is "http://host:port". Throws std::invalid_argument otherwise.
  explicit HttpTransport(std::string base_url,
                         std::chrono::milliseconds timeout = std::chrono::seconds(10));

  HttpResponse post(std::string_view path, const std::string& body) override;
  HttpResponse get(std::string_view path) override;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// Posts `request` and decodes the reply. A reply that is not a protocol
// message surfaces as a ProtocolError of the decode failure. ErrorReply is
// returned like any other message.
protocol::Message exchange(Transport& transport, std::string_view path,
                           const protocol::Message& request);

}  // namespace keyauth

#endif  // KEYAUTH_TRANSPORT_H_
