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

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include <gtest/gtest.h>

#include "keyauth/rp_sdk.h"
#include "test_support.h"

namespace keyauth::rp {
namespace {

using namespace std::chrono_literals;
using keyauth::testing::FakeClock;
using keyauth::testing::InProcessTransport;
using keyauth::testing::RecordingTransport;
using keyauth::testing::register_request;
using keyauth::testing::ServiceFixture;
using keyauth::testing::sign_submission;
using keyauth::testing::TempDir;
using keyauth::testing::test_keypair;
using std::chrono::system_clock;

// Routes in process and records every call.
class Wire : public Transport {
 public:
  explicit Wire(server::Service& service) : inner_(service), rec_(inner_) {}
  HttpResponse post(std::string_view p, const std::string& b) override { return rec_.post(p, b); }
  HttpResponse get(std::string_view p) override { return rec_.get(p); }
  RecordingTransport& rec() { return rec_; }

 private:
  InProcessTransport inner_;
  RecordingTransport rec_;
};

class DownTransport : public Transport {
 public:
  HttpResponse post(std::string_view, const std::string&) override { throw NetworkError("down"); }
  HttpResponse get(std::string_view) override { throw NetworkError("down"); }
};

template <typename Fn>
Errc rp_error(Fn&& fn) {
  try {
    fn();
  } catch (const RpError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kServerError;
}

class RpTest : public ::testing::Test {
 protected:
  RpTest() : wire_(std::make_shared<Wire>(*fx_.service)) {
    fx_.service->register_key(register_request("alice", test_keypair(1)));
  }

  RpSession::WallClock wall() {
    return [this] { return system_clock::time_point(std::chrono::seconds(fx_.clock.now())); };
  }
  RpSession session(VerifyMode mode) { return RpSession(wire_, mode, wall()); }
  RpSession offline() { return RpSession::offline(wire_, fx_.service->server_key_pem(), wall()); }

  std::string sign_in(const RpSession& s, const std::string& service = "mail") {
    const auto pending = begin_auth(s, "alice", service);
    fx_.service->submit_response(sign_submission(
        {pending.challenge_id, pending.nonce, pending.expires_at, pending.poll_secret}, service,
        "alice", test_keypair(1)));
    AwaitOptions opts;
    opts.deadline = system_clock::now() + 5s;
    return await_completion(s, pending, opts);
  }

  ServiceFixture fx_;
  std::shared_ptr<Wire> wire_;
};

TEST_F(RpTest, BeginAuth) {
  const auto s = session(VerifyMode::kRemote);
  const auto a = begin_auth(s, "alice", "mail");
  const auto b = begin_auth(s, "alice", "mail");
  EXPECT_GT(a.expires_at, fx_.clock.now());
  EXPECT_NE(a.poll_secret, b.poll_secret);
  EXPECT_NE(a.challenge_id, b.challenge_id);
  EXPECT_EQ(rp_error([&] { begin_auth(s, "mallory", "mail"); }), Errc::kUnknownUser);
  EXPECT_EQ(rp_error([&] { begin_auth(s, "bad id", "mail"); }), Errc::kServerError);
}

TEST_F(RpTest, FullFlowRemote) {
  const auto s = session(VerifyMode::kRemote);
  const auto who = complete_auth(s, sign_in(s));
  EXPECT_EQ(who, (AuthenticatedUser{"alice", "mail", fx_.clock.now() + 900}));
  EXPECT_EQ(wire_->rec().count("/v1/verify"), 1u);
}

TEST_F(RpTest, OfflineMakesNoNetworkCalls) {
  const auto s = offline();
  const std::string token = sign_in(session(VerifyMode::kRemote));
  const auto before = wire_->rec().calls();
  const auto who = complete_auth(s, token);
  EXPECT_EQ(who.user_id, "alice");
  EXPECT_EQ(wire_->rec().calls(), before);
  EXPECT_EQ(s.mode(), VerifyMode::kOffline);
}

TEST_F(RpTest, OfflineNeedsKey) {
  EXPECT_THROW(RpSession(wire_, VerifyMode::kOffline, wall()), std::invalid_argument);
  EXPECT_ANY_THROW(RpSession::offline(wire_, "not a pem", wall()));
}

TEST_F(RpTest, OfflineRemoteEquivalence) {
  const auto remote = session(VerifyMode::kRemote);
  const auto local = offline();
  std::mt19937 rng(31);
  int valid = 0, invalid = 0;
  for (int i = 0; i < 30; ++i) {
    const std::string token = sign_in(remote, "svc" + std::to_string(i % 5));
    for (int j = 0; j < 4; ++j) {
      std::string t = token;
      if (j > 0) {
        const std::size_t pos = rng() % t.size();
        t[pos] = static_cast<char>(t[pos] ^ (1 + rng() % 0x3f));
      }
      std::optional<AuthenticatedUser> a, b;
      std::optional<Errc> ea, eb;
      try { a = complete_auth(local, t); } catch (const RpError& e) { ea = e.code(); }
      try { b = complete_auth(remote, t); } catch (const RpError& e) { eb = e.code(); }
      EXPECT_EQ(a, b) << t;
      EXPECT_EQ(ea, eb) << t;
      (a ? valid : invalid)++;
    }
  }
  EXPECT_GE(valid, 30);
  EXPECT_GE(invalid, 60);
}

TEST_F(RpTest, ExpiredTokenInBothModes) {
  const auto remote = session(VerifyMode::kRemote);
  const auto local = offline();
  const std::string token = sign_in(remote);
  fx_.clock.advance(901);
  EXPECT_EQ(rp_error([&] { complete_auth(local, token); }), Errc::kExpiredToken);
  EXPECT_EQ(rp_error([&] { complete_auth(remote, token); }), Errc::kExpiredToken);
}

TEST_F(RpTest, AutoModeCachesServerKey) {
  const auto s = session(VerifyMode::kAuto);
  EXPECT_FALSE(s.cached_server_key());
  complete_auth(s, sign_in(s));
  EXPECT_EQ(wire_->rec().count("/v1/verify"), 1u);
  ASSERT_TRUE(s.cached_server_key());
  EXPECT_EQ(s.cached_server_key()->pem, fx_.service->server_key_pem());

  const auto copy = s;
  complete_auth(copy, sign_in(s));
  EXPECT_EQ(wire_->rec().count("/v1/verify"), 1u);

  // A stale key sends verification back to the server.
  fx_.clock.advance(24 * 3600);
  const std::string late = sign_in(s);
  complete_auth(s, late);
  EXPECT_EQ(wire_->rec().count("/v1/verify"), 2u);
  EXPECT_EQ(wire_->rec().count("/v1/server-key"), 2u);
}

TEST_F(RpTest, WrongPollSecretUnauthorized) {
  const auto s = session(VerifyMode::kRemote);
  auto pending = begin_auth(s, "alice", "mail");
  pending.poll_secret = PollSecret::random();
  const auto before = wire_->rec().count("/v1/poll");
  EXPECT_EQ(rp_error([&] { await_completion(s, pending); }), Errc::kUnauthorized);
  EXPECT_EQ(wire_->rec().count("/v1/poll") - before, 1u);
}

TEST_F(RpTest, TokenDeliveredOnce) {
  const auto s = session(VerifyMode::kRemote);
  const auto pending = begin_auth(s, "alice", "mail");
  fx_.service->submit_response(sign_submission(
      {pending.challenge_id, pending.nonce, pending.expires_at, pending.poll_secret}, "mail",
      "alice", test_keypair(1)));
  AwaitOptions opts;
  opts.deadline = system_clock::now() + 5s;
  EXPECT_NO_THROW(await_completion(s, pending, opts));
  EXPECT_EQ(rp_error([&] { await_completion(s, pending, opts); }), Errc::kTokenAlreadyDelivered);
}

TEST_F(RpTest, AwaitPacesPolls) {
  const auto s = session(VerifyMode::kRemote);
  const auto pending = begin_auth(s, "alice", "mail");
  const auto start = std::chrono::steady_clock::now();
  std::thread agent([&] {
    std::this_thread::sleep_for(250ms);
    fx_.service->submit_response(sign_submission(
        {pending.challenge_id, pending.nonce, pending.expires_at, pending.poll_secret}, "mail",
        "alice", test_keypair(1)));
  });
  AwaitOptions opts;
  opts.poll_interval = 20ms;
  opts.deadline = system_clock::now() + 5s;
  const std::string token = await_completion(s, pending, opts);
  agent.join();
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const auto polls = wire_->rec().count("/v1/poll");
  EXPECT_FALSE(token.empty());
  EXPECT_LE(static_cast<double>(polls), std::ceil(elapsed_ms / 20.0) + 1);
  EXPECT_GE(polls, 2u);
}

TEST_F(RpTest, AwaitTimesOut) {
  const auto s = session(VerifyMode::kRemote);
  const auto pending = begin_auth(s, "alice", "mail");
  AwaitOptions opts;
  opts.poll_interval = 10ms;
  opts.deadline = system_clock::now() + 50ms;
  EXPECT_EQ(rp_error([&] { await_completion(s, pending, opts); }), Errc::kTimeout);
}

TEST(RpRealClock, UnansweredChallengeExpires) {
  TempDir dir;
  auto config = keyauth::testing::test_config(dir / "data");
  config.challenge_ttl = 1;
  server::Service service(config, test_keypair(0), unix_now);
  service.register_key(register_request("alice", test_keypair(1)));
  const RpSession s(std::make_shared<InProcessTransport>(service), VerifyMode::kRemote);
  const auto pending = begin_auth(s, "alice", "mail");
  AwaitOptions opts;
  opts.poll_interval = 100ms;
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(rp_error([&] { await_completion(s, pending, opts); }), Errc::kExpired);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 2500ms);
}

TEST(RpNetwork, NetworkErrors) {
  const RpSession s(std::make_shared<DownTransport>(), VerifyMode::kRemote);
  EXPECT_EQ(rp_error([&] { begin_auth(s, "alice", "mail"); }), Errc::kNetworkError);
  EXPECT_EQ(rp_error([&] { complete_auth(s, "a.b"); }), Errc::kNetworkError);
  const RpSession a(std::make_shared<DownTransport>(), VerifyMode::kAuto);
  EXPECT_EQ(rp_error([&] { complete_auth(a, "a.b"); }), Errc::kNetworkError);
}

TEST(RpNetwork, OfflineNeverTouchesNetwork) {
  ServiceFixture fx;
  const auto s = RpSession::offline(std::make_shared<DownTransport>(), fx.service->server_key_pem());
  EXPECT_EQ(rp_error([&] { complete_auth(s, "a.b"); }), Errc::kInvalidToken);
}

}  // namespace
}  // namespace keyauth::rp
