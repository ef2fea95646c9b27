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

#include "keyauth/transport.h"

#include <httplib.h>

namespace keyauth {
namespace {

httplib::Client make_client(const std::string& base_url,
                            std::chrono::milliseconds timeout) {
  httplib::Client client(base_url);
  client.set_keep_alive(false);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

HttpResponse unwrap(const httplib::Result& result, const std::string& base_url,
                    std::string_view path) {
  if (!result) {
    throw NetworkError("request to " + base_url + std::string(path) +
                       " failed: " + httplib::to_string(result.error()));
  }
  return HttpResponse{result->status, result->body};
}

}  // namespace

HttpTransport::HttpTransport(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  if (!base_url_.starts_with("http://")) {
    throw std::invalid_argument("server URL must start with http://, got " + base_url_);
  }
  while (base_url_.ends_with('/')) base_url_.pop_back();
  if (!make_client(base_url_, timeout_).is_valid()) {
    throw std::invalid_argument("unusable server URL " + base_url_);
  }
}

HttpResponse HttpTransport::post(std::string_view path, const std::string& body) {
  httplib::Client client = make_client(base_url_, timeout_);
  return unwrap(client.Post(std::string(path), body, "application/json"),
                base_url_, path);
}

HttpResponse HttpTransport::get(std::string_view path) {
  httplib::Client client = make_client(base_url_, timeout_);
  return unwrap(client.Get(std::string(path)), base_url_, path);
}

protocol::Message exchange(Transport& transport, std::string_view path,
                           const protocol::Message& request) {
  const HttpResponse response = transport.post(path, protocol::encode_message(request));
  return protocol::decode_message(response.body);
}

}  // namespace keyauth
