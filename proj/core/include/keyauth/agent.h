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

// End-user agent: one sealed key pair used for every service. The `keyauth`
// command line tool is a thin shell around these functions.

#ifndef KEYAUTH_AGENT_H_
#define KEYAUTH_AGENT_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "keyauth/crypto.h"
#include "keyauth/keystore.h"
#include "keyauth/protocol.h"
#include "keyauth/transport.h"

namespace keyauth::agent {

enum class ExitCode : int {
  kSuccess = 0,
  kUserDeclined = 2,
  kProtocolError = 3,
  kNetworkError = 4,
  kLocalError = 5,
};

// `code` is a server error code verbatim for protocol errors, otherwise one
// of user-declined, network-error, file-exists, weak-passphrase,
// bad-passphrase, format-error, io-error, invalid-argument.
class AgentError : public std::runtime_error {
 public:
  AgentError(ExitCode exit_code, std::string code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code), code_(std::move(code)) {}

  ExitCode exit_code() const noexcept { return exit_code_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ExitCode exit_code_;
  std::string code_;
};

struct AgentConfig {
  std::filesystem::path keystore_path = keystore::default_key_path();
  std::string default_server_url;
  // Skip the approval prompt. Only ever set explicitly (--yes).
  bool auto_approve = false;
  keystore::ScryptParams kdf = keystore::ScryptParams::interactive();
};

inline constexpr std::size_t kMinPassphraseLength = 8;

struct KeygenOptions {
  int bits = crypto::kDefaultModulusBits;
  bool force = false;
  bool allow_weak_passphrase = false;
};

// Generates and seals a fresh key pair at config.keystore_path and returns
// its fingerprint.
Fingerprint keygen(const AgentConfig& config, const KeygenOptions& options,
                   std::string_view passphrase);

// An opened key file. The private key lives only in this object's memory.
class Identity {
 public:
  static Identity unlock(const std::filesystem::path& keystore_path,
                         std::string_view passphrase);

  const crypto::PrivateKey& private_key() const { return pair_.private_key; }
  const crypto::PublicKey& public_key() const { return pair_.public_key; }
  const Fingerprint& fingerprint() const { return fingerprint_; }

 private:
  Identity(crypto::KeyPair pair, Fingerprint fp)
      : pair_(std::move(pair)), fingerprint_(fp) {}

  crypto::KeyPair pair_;
  Fingerprint fingerprint_;
};

// "Approve sign-in to <service_id> as <user_id>? [y/N]"
std::string approval_prompt(std::string_view service_id, std::string_view user_id);

using Approver = std::function<bool(const std::string& prompt)>;
using Signer = std::function<crypto::Signature(const crypto::PrivateKey&, ByteView)>;

// Challenge parameters handed over out of band by a relying party.
struct ChallengeParams {
  ChallengeId challenge_id;
  Nonce nonce;
  std::string service_id;
  std::string user_id;
};

class Agent {
 public:
  // `transport` must outlive the agent. `approver` is consulted before every
  // signature unless config.auto_approve is set.
  Agent(AgentConfig config, Transport& transport, Approver approver,
        Signer signer = crypto::sign);

  // Sends the public key only.
  protocol::RegisterResult register_identity(
      const Identity& identity, std::string_view user_id,
      const std::optional<std::string>& registration_token = std::nullopt);

  // Requests a challenge, asks for approval, signs and submits. Returns the
  // assertion token.
  std::string login(const Identity& identity, std::string_view user_id,
                    std::string_view service_id);

  // Answers a challenge someone else requested. The token goes to whoever
  // holds the poll secret, so nothing is returned.
  void respond(const Identity& identity, const ChallengeParams& params);

 private:
  protocol::Message call(std::string_view path, const protocol::Message& request);
  void require_approval(std::string_view service_id, std::string_view user_id);
  std::string sign_and_submit(const Identity& identity, const ChallengeId& id,
                              const Nonce& nonce, std::string_view service_id,
                              std::string_view user_id);

  AgentConfig config_;
  Transport& transport_;
  Approver approver_;
  Signer signer_;
};

}  // namespace keyauth::agent

#endif  // KEYAUTH_AGENT_H_
