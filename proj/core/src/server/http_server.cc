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

#include "keyauth/server/http_server.h"

// The library default of 5 drops bursts of concurrent clients.
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <stdexcept>
#include <thread>

namespace keyauth::server {
namespace {

using namespace keyauth::protocol;

constexpr const char* kJson = "application/json";

HttpReply reply_for(const Message& message) {
  int status = 200;
  if (const auto* err = std::get_if<ErrorReply>(&message)) {
    status = http_status(err->code);
  }
  return HttpReply{status, kJson, encode_message(message)};
}

HttpReply error_reply(ErrorCode code, std::string message, int status = 0) {
  HttpReply r = reply_for(ErrorReply{code, std::move(message)});
  if (status != 0) r.status = status;
  return r;
}

template <typename Request>
HttpReply dispatch(Service& service, std::string_view body) {
  Message request;
  try {
    request = decode_message(body);
  } catch (const ProtocolError& e) {
    return error_reply(e.code(), e.what());
  }
  if (!std::holds_alternative<Request>(request)) {
    return error_reply(ErrorCode::kSchemaViolation,
                       "endpoint does not accept " +
                           std::string(message_type(request)));
  }
  return reply_for(service.handle(request));
}

}  // namespace

bool RateLimiter::allow(const std::string& client, std::int64_t now) {
  if (per_minute_ == 0) return true;
  std::lock_guard lock(mu_);
  if (windows_.size() > 4096) {
    std::erase_if(windows_, [&](const auto& kv) { return now - kv.second.start >= 60; });
  }
  Window& w = windows_[client];
  if (now - w.start >= 60) {
    w.start = now;
    w.count = 0;
  }
  if (w.count >= per_minute_) return false;
  ++w.count;
  return true;
}

HttpReply route_request(Service& service, RateLimiter& limiter,
                        std::string_view method, std::string_view path,
                        std::string_view body, const std::string& client) {
  if (path == "/v1/server-key") {
    if (method != "GET") return HttpReply{405, "text/plain", "method not allowed\n"};
    return HttpReply{200, "application/x-pem-file", service.server_key_pem()};
  }

  const bool known = path == "/v1/register" || path == "/v1/challenge" ||
                     path == "/v1/authenticate" || path == "/v1/poll" ||
                     path == "/v1/verify";
  if (!known) return HttpReply{404, "text/plain", "not found\n"};
  if (method != "POST") return HttpReply{405, "text/plain", "method not allowed\n"};

  if (path == "/v1/register") return dispatch<RegisterRequest>(service, body);
  if (path == "/v1/challenge") {
    if (!limiter.allow(client, unix_now())) {
      return error_reply(ErrorCode::kUnauthorized,
                         "challenge rate limit exceeded for this address", 429);
    }
    return dispatch<ChallengeRequest>(service, body);
  }
  if (path == "/v1/authenticate") return dispatch<AuthSubmission>(service, body);
  if (path == "/v1/poll") return dispatch<PollRequest>(service, body);
  return dispatch<VerifyRequest>(service, body);
}

struct HttpServer::Impl {
  Service& service;
  std::string host;
  int requested_port;
  int bound_port = -1;
  RateLimiter limiter;
  httplib::Server http;
  std::thread listener;
  std::thread evictor;
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;

  Impl(Service& s, std::string h, int p)
      : service(s),
        host(std::move(h)),
        requested_port(p),
        limiter(s.config().challenge_rate_limit) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      HttpReply r = route_request(service, limiter, req.method, req.path,
                                  req.body, req.remote_addr);
      res.status = r.status;
      res.set_content(std::move(r.body), r.content_type);
    };
    http.Get(R"(/.*)", handler);
    http.Post(R"(/.*)", handler);
    http.Put(R"(/.*)", handler);
    http.Delete(R"(/.*)", handler);
    http.set_payload_max_length(64 * 1024);
  }

  void bind() {
    if (requested_port == 0) {
      bound_port = http.bind_to_any_port(host);
    } else {
      bound_port = http.bind_to_port(host, requested_port) ? requested_port : -1;
    }
    if (bound_port < 0) {
      throw std::runtime_error("cannot listen on " + host + ":" +
                               std::to_string(requested_port));
    }
  }

  void start_evictor() {
    evictor = std::thread([this] {
      std::unique_lock lock(mu);
      while (!stopping) {
        cv.wait_for(lock, std::chrono::seconds(1));
        if (stopping) break;
        lock.unlock();
        service.evict_expired();
        lock.lock();
      }
    });
  }
};

HttpServer::HttpServer(Service& service, std::string host, int port)
    : impl_(std::make_unique<Impl>(service, std::move(host), port)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  impl_->bind();
  impl_->listener = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  impl_->start_evictor();
  return impl_->bound_port;
}

void HttpServer::run() {
  impl_->bind();
  impl_->start_evictor();
  impl_->http.listen_after_bind();
}

void HttpServer::stop() {
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopping) return;
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->http.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->evictor.joinable()) impl_->evictor.join();
}

int HttpServer::port() const { return impl_->bound_port; }

std::string HttpServer::base_url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->bound_port);
}

}  // namespace keyauth::server
