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

#include <sys/stat.h>

#include <atomic>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "keyauth/agent.h"
#include "keyauth/token.h"
#include "test_support.h"

namespace keyauth::agent {
namespace {

using namespace keyauth::protocol;
using keyauth::testing::contains_private_material;
using keyauth::testing::InProcessTransport;
using keyauth::testing::read_text;
using keyauth::testing::RecordingTransport;
using keyauth::testing::ServiceFixture;

constexpr const char* kPass = "correct horse battery";

class FailingTransport : public Transport {
 public:
  HttpResponse post(std::string_view, const std::string&) override {
    throw NetworkError("connection refused");
  }
  HttpResponse get(std::string_view) override { throw NetworkError("connection refused"); }
};

AgentConfig make_config(const std::filesystem::path& dir) {
  AgentConfig c;
  c.keystore_path = dir / "identity.kskey";
  c.kdf = {1u << 10, 8, 1};
  return c;
}

template <typename Fn>
AgentError agent_error(Fn&& fn) {
  try {
    fn();
  } catch (const AgentError& e) {
    return e;
  }
  ADD_FAILURE() << "no error";
  return AgentError(ExitCode::kSuccess, "", "");
}

class AgentTest : public ::testing::Test {
 protected:
  AgentTest()
      : config_(make_config(fx_.dir / "agent")),
        inner_(*fx_.service),
        wire_(inner_) {
    KeygenOptions opts;
    opts.bits = 2048;
    keygen(config_, opts, kPass);
    identity_.emplace(Identity::unlock(config_.keystore_path, kPass));
  }

  Agent make_agent(bool approve = true) {
    return Agent(config_, wire_,
                 [this, approve](const std::string& prompt) {
                   prompts_.push_back(prompt);
                   return approve;
                 },
                 [this](const crypto::PrivateKey& k, ByteView m) {
                   ++signs_;
                   return crypto::sign(k, m);
                 });
  }

  const Identity& id() const { return *identity_; }

  ServiceFixture fx_;
  AgentConfig config_;
  InProcessTransport inner_;
  RecordingTransport wire_;
  std::optional<Identity> identity_;
  std::vector<std::string> prompts_;
  int signs_ = 0;
};

TEST_F(AgentTest, KeygenWritesPrivateFile) {
  struct stat st {};
  ASSERT_EQ(::stat(config_.keystore_path.c_str(), &st), 0);
  EXPECT_EQ(st.st_mode & 0777, 0600u);
  EXPECT_FALSE(contains_private_material(read_text(config_.keystore_path), id().private_key()));
  EXPECT_EQ(id().fingerprint(), crypto::fingerprint(id().public_key()));
}

TEST_F(AgentTest, KeygenRefusesToOverwrite) {
  KeygenOptions opts;
  opts.bits = 2048;
  auto e = agent_error([&] { keygen(config_, opts, kPass); });
  EXPECT_EQ(e.code(), "file-exists");
  EXPECT_EQ(e.exit_code(), ExitCode::kLocalError);
  opts.force = true;
  const auto fp = keygen(config_, opts, kPass);
  EXPECT_NE(fp, id().fingerprint());
}

TEST_F(AgentTest, KeygenChecksInputs) {
  keyauth::testing::TempDir dir;
  auto config = make_config(dir.path());
  KeygenOptions opts;
  opts.bits = 2048;
  EXPECT_EQ(agent_error([&] { keygen(config, opts, "short"); }).code(), "weak-passphrase");
  opts.allow_weak_passphrase = true;
  EXPECT_NO_THROW(keygen(config, opts, "short"));
  opts.bits = 1024;
  opts.force = true;
  EXPECT_EQ(agent_error([&] { keygen(config, opts, kPass); }).code(), "invalid-argument");
}

TEST_F(AgentTest, UnlockWithWrongPassphrase) {
  const auto e = agent_error([&] { Identity::unlock(config_.keystore_path, "nope nope"); });
  EXPECT_EQ(e.code(), "bad-passphrase");
  EXPECT_EQ(e.exit_code(), ExitCode::kLocalError);
}

TEST_F(AgentTest, RegisterSendsPublicKeyOnly) {
  auto agent = make_agent();
  const auto r = agent.register_identity(id(), "alice");
  EXPECT_EQ(r.fingerprint, id().fingerprint());
  const auto active = fx_.service->registry().find_active("alice");
  ASSERT_TRUE(active);
  EXPECT_EQ(active->record.fingerprint, id().fingerprint());
  ASSERT_EQ(wire_.calls(), 1u);
  for (const auto& x : wire_.exchanges()) {
    EXPECT_FALSE(contains_private_material(x.request, id().private_key()));
    EXPECT_FALSE(contains_private_material(x.response, id().private_key()));
  }
  EXPECT_NE(wire_.exchanges()[0].request.find("BEGIN PUBLIC KEY"), std::string::npos);
}

TEST_F(AgentTest, LoginWithApproval) {
  auto agent = make_agent();
  agent.register_identity(id(), "alice");
  const std::string token = agent.login(id(), "alice", "mail");
  const auto check = check_token(fx_.service->server_public_key(), token, fx_.clock.now());
  ASSERT_TRUE(check.valid());
  EXPECT_EQ(check.claims->service_id, "mail");
  ASSERT_EQ(prompts_.size(), 1u);
  EXPECT_EQ(prompts_[0], "Approve sign-in to mail as alice? [y/N]");
  EXPECT_EQ(signs_, 1);
  for (const auto& x : wire_.exchanges()) {
    EXPECT_FALSE(contains_private_material(x.request, id().private_key()));
  }
}

TEST_F(AgentTest, DeclineSignsNothing) {
  make_agent().register_identity(id(), "alice");
  auto agent = make_agent(false);
  const auto e = agent_error([&] { agent.login(id(), "alice", "mail"); });
  EXPECT_EQ(e.code(), "user-declined");
  EXPECT_EQ(e.exit_code(), ExitCode::kUserDeclined);
  EXPECT_EQ(signs_, 0);
  EXPECT_EQ(wire_.count("/v1/authenticate"), 0u);
}

TEST_F(AgentTest, AutoApproveSkipsPrompt) {
  config_.auto_approve = true;
  auto agent = make_agent(false);
  agent.register_identity(id(), "alice");
  EXPECT_NO_THROW(agent.login(id(), "alice", "mail"));
  EXPECT_TRUE(prompts_.empty());
}

TEST_F(AgentTest, OneIdentityManyServices) {
  auto agent = make_agent();
  agent.register_identity(id(), "alice");
  const std::string before = read_text(config_.keystore_path);
  for (const std::string svc : {"mail", "wiki", "git", "chat", "files"}) {
    const auto check = check_token(fx_.service->server_public_key(),
                                   agent.login(id(), "alice", svc), fx_.clock.now());
    ASSERT_TRUE(check.valid());
    EXPECT_EQ(check.claims->service_id, svc);
  }
  EXPECT_EQ(read_text(config_.keystore_path), before);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(config_.keystore_path.parent_path())) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
}

TEST_F(AgentTest, RespondThenInitiatorPolls) {
  auto agent = make_agent();
  agent.register_identity(id(), "alice");
  const auto reply = fx_.service->issue_challenge({"alice", "wiki"});
  agent.respond(id(), {reply.challenge_id, reply.nonce, "wiki", "alice"});
  const auto poll = fx_.service->poll_challenge({reply.challenge_id, reply.poll_secret});
  EXPECT_EQ(poll.status, PollStatus::kCompleted);
  ASSERT_TRUE(poll.token);
  EXPECT_TRUE(fx_.service->verify_token({*poll.token}).valid);
  EXPECT_EQ(prompts_.back(), "Approve sign-in to wiki as alice? [y/N]");
}

TEST_F(AgentTest, RespondErrorsSurfaceVerbatim) {
  auto agent = make_agent();
  agent.register_identity(id(), "alice");

  auto reply = fx_.service->issue_challenge({"alice", "wiki"});
  Nonce tampered = reply.nonce;
  tampered.mutable_view()[0] ^= 1;
  auto e = agent_error([&] { agent.respond(id(), {reply.challenge_id, tampered, "wiki", "alice"}); });
  EXPECT_EQ(e.code(), "bad-signature");
  EXPECT_EQ(e.exit_code(), ExitCode::kProtocolError);

  fx_.clock.advance(121);
  e = agent_error([&] { agent.respond(id(), {reply.challenge_id, reply.nonce, "wiki", "alice"}); });
  EXPECT_EQ(e.code(), "expired");
  EXPECT_EQ(e.exit_code(), ExitCode::kProtocolError);
}

TEST_F(AgentTest, ServerErrorsSurfaceVerbatim) {
  auto agent = make_agent();
  auto e = agent_error([&] { agent.login(id(), "alice", "mail"); });
  EXPECT_EQ(e.code(), "unknown-user");
  EXPECT_EQ(e.exit_code(), ExitCode::kProtocolError);
  e = agent_error([&] { agent.login(id(), "bad user", "mail"); });
  EXPECT_EQ(e.exit_code(), ExitCode::kProtocolError);
}

TEST_F(AgentTest, NetworkErrors) {
  FailingTransport down;
  Agent agent(config_, down, [](const std::string&) { return true; });
  const auto e = agent_error([&] { agent.register_identity(id(), "alice"); });
  EXPECT_EQ(e.code(), "network-error");
  EXPECT_EQ(e.exit_code(), ExitCode::kNetworkError);
}

TEST(AgentTokenMode, WrongRegistrationTokenSurfaced) {
  server::ServerConfig base;
  base.registration_mode = server::RegistrationMode::kToken;
  base.registration_token = "letmein";
  ServiceFixture fx(base);
  auto config = make_config(fx.dir / "agent");
  KeygenOptions opts;
  opts.bits = 2048;
  keygen(config, opts, kPass);
  const auto identity = Identity::unlock(config.keystore_path, kPass);
  InProcessTransport transport(*fx.service);
  Agent agent(config, transport, [](const std::string&) { return true; });
  const auto e = agent_error([&] { agent.register_identity(identity, "alice", "guess"); });
  EXPECT_EQ(e.code(), "unauthorized");
  EXPECT_NO_THROW(agent.register_identity(identity, "alice", "letmein"));
}

}  // namespace
}  // namespace keyauth::agent
