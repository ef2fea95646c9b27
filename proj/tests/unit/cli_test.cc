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

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "keyauth/server/http_server.h"
#include "keyauth/token.h"
#include "test_support.h"

namespace keyauth {
namespace {

using keyauth::testing::read_text;
using keyauth::testing::ServiceFixture;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : server_(*fx_.service, "127.0.0.1", 0) {
    server_.start();
    url_ = server_.base_url();
  }

  RunResult run(const std::string& args, const std::string& input = "",
                const std::string& pass = "correct horse battery") {
    const auto err_file = fx_.dir / "stderr.txt";
    std::string cmd = "KEYAUTH_PASSPHRASE=" + quote(pass) +
                      " KEYAUTH_KEYSTORE=" + quote((fx_.dir / "id.kskey").string()) + " ";
    cmd += quote(KEYAUTH_CLI_PATH) + " " + args + " 2>" + quote(err_file.string());
    cmd = "printf %s " + quote(input) + " | " + cmd;
    RunResult r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (p == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_text(err_file);
    return r;
  }

  void enroll() {
    ASSERT_EQ(run("keygen --bits 2048").exit_code, 0);
    ASSERT_EQ(run("register --server " + url_ + " --user alice").exit_code, 0);
  }

  ServiceFixture fx_;
  server::HttpServer server_;
  std::string url_;
};

TEST_F(CliTest, KeygenPrintsFingerprintOnly) {
  const auto r = run("keygen --bits 2048");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  ASSERT_EQ(r.out.size(), 44u);
  EXPECT_EQ(r.out.back(), '\n');
  EXPECT_EQ(run("keygen --bits 2048").exit_code, 5);
  EXPECT_EQ(run("keygen --bits 2048", "", "short").exit_code, 5);
}

TEST_F(CliTest, LoginPrintsOnlyTheToken) {
  enroll();
  const auto r = run("login --server " + url_ + " --user alice --service mail --yes");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  ASSERT_FALSE(r.out.empty());
  EXPECT_EQ(r.out.find('\n'), r.out.size() - 1);
  const std::string token = r.out.substr(0, r.out.size() - 1);
  EXPECT_TRUE(check_token(fx_.service->server_public_key(), token, fx_.clock.now()).valid());
}

TEST_F(CliTest, PromptAcceptsAnswerOnStdin) {
  enroll();
  auto r = run("login --server " + url_ + " --user alice --service mail", "y\n");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.err.find("Approve sign-in to mail as alice? [y/N]"), std::string::npos);
  r = run("login --server " + url_ + " --user alice --service mail", "n\n");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_TRUE(r.out.empty());
  r = run("login --server " + url_ + " --user alice --service mail", "");
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, RespondPrintsNothing) {
  enroll();
  const auto reply = fx_.service->issue_challenge({"alice", "wiki"});
  const auto r = run("respond --server " + url_ + " --challenge " +
                     reply.challenge_id.to_base64url() + " --nonce " + reply.nonce.to_base64url() +
                     " --service wiki --user alice --yes");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto poll = fx_.service->poll_challenge({reply.challenge_id, reply.poll_secret});
  EXPECT_EQ(poll.status, protocol::PollStatus::kCompleted);
  EXPECT_TRUE(poll.token);
}

TEST_F(CliTest, ExitCodes) {
  enroll();
  auto r = run("login --server " + url_ + " --user bob --service mail --yes");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("unknown-user"), std::string::npos);
  r = run("login --server http://127.0.0.1:1 --user alice --service mail --yes");
  EXPECT_EQ(r.exit_code, 4);
  r = run("login --server " + url_ + " --user alice --service mail --yes", "", "wrong passphrase");
  EXPECT_EQ(r.exit_code, 5);
  EXPECT_NE(r.err.find("bad-passphrase"), std::string::npos);
  r = run("respond --server " + url_ + " --challenge xx --nonce yy --service s --user alice --yes");
  EXPECT_EQ(r.exit_code, 5);
  EXPECT_EQ(run("frobnicate").exit_code, 5);
}

}  // namespace
}  // namespace keyauth
