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

// keyauth: end-user agent.
//
//   keyauth keygen [--bits N] [--force]
//   keyauth register --server URL --user ID [--reg-token T]
//   keyauth login --server URL --user ID --service ID [--yes]
//   keyauth respond --server URL --challenge ID --nonce B64 --service ID
//                   --user ID [--yes]
//
// Exit codes: 0 success, 2 declined, 3 protocol error, 4 network error,
// 5 local error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "keyauth/agent.h"
#include "keyauth/transport.h"
#include "terminal.h"

namespace {

using keyauth::SecretString;
using keyauth::agent::AgentError;
using keyauth::agent::ExitCode;

AgentError local(std::string code, const std::string& message) {
  return AgentError(ExitCode::kLocalError, std::move(code), message);
}

// KEYAUTH_PASSPHRASE exists for unattended tests; interactive use goes
// through the terminal with echo off.
SecretString passphrase(bool confirm_new) {
  if (const char* env = std::getenv("KEYAUTH_PASSPHRASE")) return SecretString(env);
  auto first = keyauth::tools::read_secret(confirm_new ? "New passphrase: " : "Passphrase: ");
  if (!first) throw local("no-passphrase", "no terminal to read the passphrase from");
  if (confirm_new) {
    auto again = keyauth::tools::read_secret("Repeat passphrase: ");
    if (!again || *again != *first) throw local("weak-passphrase", "passphrases do not match");
  }
  return *first;
}

std::string server_url(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("KEYAUTH_SERVER")) return env;
  throw local("invalid-argument", "--server is required");
}

std::unique_ptr<keyauth::HttpTransport> connect(const std::string& url) {
  try {
    return std::make_unique<keyauth::HttpTransport>(url);
  } catch (const std::invalid_argument& e) {
    throw local("invalid-argument", e.what());
  }
}

template <typename Fixed>
Fixed parse_fixed(const std::string& text, const char* what) {
  auto value = Fixed::from_base64url(text);
  if (!value) {
    throw local("invalid-argument", std::string(what) + " must be " +
                                        std::to_string(Fixed::kSize) +
                                        " bytes of base64url");
  }
  return *value;
}

bool ask(const std::string& prompt) { return keyauth::tools::confirm(prompt); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KeyAuth agent: sign in with your key instead of a password"};
  app.require_subcommand(1);

  keyauth::agent::AgentConfig config;
  std::string keystore_path = config.keystore_path.string();
  app.add_option("--keystore", keystore_path, "Sealed key file")
      ->envname("KEYAUTH_KEYSTORE")
      ->capture_default_str();

  auto* keygen = app.add_subcommand("keygen", "Create and seal your key pair");
  keyauth::agent::KeygenOptions keygen_opts;
  keygen->add_option("--bits", keygen_opts.bits, "RSA modulus size")
      ->check(CLI::IsMember({2048, 3072, 4096}))
      ->capture_default_str();
  keygen->add_flag("--force", keygen_opts.force, "Replace an existing key file");
  keygen->add_flag("--allow-weak-passphrase", keygen_opts.allow_weak_passphrase,
                   "Accept passphrases shorter than 8 characters");

  std::string server, user, service, reg_token, challenge, nonce;
  bool yes = false;

  auto* reg = app.add_subcommand("register", "Register your public key with a server");
  reg->add_option("--server", server, "Server URL (or KEYAUTH_SERVER)");
  reg->add_option("--user", user, "User id")->required();
  auto* reg_token_opt = reg->add_option("--reg-token", reg_token, "Registration token");

  auto* login = app.add_subcommand("login", "Sign in and print an assertion token");
  login->add_option("--server", server, "Server URL (or KEYAUTH_SERVER)");
  login->add_option("--user", user, "User id")->required();
  login->add_option("--service", service, "Service id")->required();
  login->add_flag("--yes", yes, "Approve without prompting");

  auto* respond = app.add_subcommand("respond", "Answer a challenge shown by a service");
  respond->add_option("--server", server, "Server URL (or KEYAUTH_SERVER)");
  respond->add_option("--challenge", challenge, "Challenge id")->required();
  respond->add_option("--nonce", nonce, "Challenge nonce")->required();
  respond->add_option("--service", service, "Service id")->required();
  respond->add_option("--user", user, "User id")->required();
  respond->add_flag("--yes", yes, "Approve without prompting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kLocalError);
  }

  config.keystore_path = keystore_path;
  config.auto_approve = yes;

  try {
    if (keygen->parsed()) {
      const auto fp = keyauth::agent::keygen(config, keygen_opts, passphrase(true));
      std::cout << fp.to_base64url() << '\n';
      return 0;
    }

    const auto identity = keyauth::agent::Identity::unlock(config.keystore_path, passphrase(false));
    auto transport = connect(server_url(server));
    keyauth::agent::Agent agent(config, *transport, ask);

    if (reg->parsed()) {
      std::optional<std::string> token;
      if (reg_token_opt->count() > 0) token = reg_token;
      const auto result = agent.register_identity(identity, user, token);
      std::cout << "registered " << result.user_id << ' '
                << result.fingerprint.to_base64url() << '\n';
    } else if (login->parsed()) {
      std::cout << agent.login(identity, user, service) << '\n';
    } else if (respond->parsed()) {
      agent.respond(identity,
                    {parse_fixed<keyauth::ChallengeId>(challenge, "--challenge"),
                     parse_fixed<keyauth::Nonce>(nonce, "--nonce"), service, user});
    }
    return 0;
  } catch (const AgentError& e) {
    std::cerr << "keyauth: " << e.code() << ": " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "keyauth: error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kLocalError);
  }
}
