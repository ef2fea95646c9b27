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

#include "keyauth/agent.h"

namespace keyauth::agent {
namespace {

using namespace keyauth::protocol;

AgentError local_error(std::string code, const std::string& message) {
  return AgentError(ExitCode::kLocalError, std::move(code), message);
}

AgentError from_keystore(const keystore::KeystoreError& e) {
  return local_error(std::string(keystore::to_string(e.code())), e.what());
}

}  // namespace

Fingerprint keygen(const AgentConfig& config, const KeygenOptions& options,
                   std::string_view passphrase) {
  if (passphrase.empty()) {
    throw local_error("weak-passphrase", "passphrase must not be empty");
  }
  if (passphrase.size() < kMinPassphraseLength && !options.allow_weak_passphrase) {
    throw local_error("weak-passphrase",
                      "passphrase must be at least " +
                          std::to_string(kMinPassphraseLength) + " characters");
  }
  if (!crypto::is_supported_modulus(options.bits)) {
    throw local_error("invalid-argument", "key size must be 2048, 3072 or 4096 bits");
  }
  std::error_code ec;
  if (!options.force && std::filesystem::exists(config.keystore_path, ec)) {
    throw local_error("file-exists",
                      "key file already exists: " + config.keystore_path.string());
  }

  const crypto::KeyPair pair = crypto::generate_keypair(options.bits);
  const keystore::EncryptedKeyFile file =
      keystore::seal_private_key(pair.private_key, passphrase, config.kdf);
  try {
    keystore::write_key_file(config.keystore_path, file, options.force);
  } catch (const keystore::KeystoreError& e) {
    throw from_keystore(e);
  }
  return file.fingerprint;
}

Identity Identity::unlock(const std::filesystem::path& keystore_path,
                          std::string_view passphrase) {
  try {
    const keystore::EncryptedKeyFile file = keystore::read_key_file(keystore_path);
    crypto::PrivateKey key = keystore::open_private_key(file, passphrase);
    return Identity(crypto::KeyPair(std::move(key)), file.fingerprint);
  } catch (const keystore::KeystoreError& e) {
    throw from_keystore(e);
  }
}

std::string approval_prompt(std::string_view service_id, std::string_view user_id) {
  return "Approve sign-in to " + std::string(service_id) + " as " +
         std::string(user_id) + "? [y/N]";
}

Agent::Agent(AgentConfig config, Transport& transport, Approver approver,
             Signer signer)
    : config_(std::move(config)),
      transport_(transport),
      approver_(std::move(approver)),
      signer_(std::move(signer)) {}

Message Agent::call(std::string_view path, const Message& request) {
  Message reply;
  try {
    reply = exchange(transport_, path, request);
  } catch (const NetworkError& e) {
    throw AgentError(ExitCode::kNetworkError, "network-error", e.what());
  } catch (const ProtocolError& e) {
    throw AgentError(ExitCode::kProtocolError, std::string(to_string(e.code())),
                     std::string("unreadable server reply: ") + e.what());
  }
  if (const auto* err = std::get_if<ErrorReply>(&reply)) {
    throw AgentError(ExitCode::kProtocolError, std::string(to_string(err->code)),
                     err->message);
  }
  return reply;
}

template <typename T>
T expect_reply(Message reply) {
  try {
    return expect<T>(std::move(reply));
  } catch (const ProtocolError& e) {
    throw AgentError(ExitCode::kProtocolError, std::string(to_string(e.code())),
                     e.what());
  }
}

void Agent::require_approval(std::string_view service_id, std::string_view user_id) {
  if (config_.auto_approve) return;
  if (!approver_ || !approver_(approval_prompt(service_id, user_id))) {
    throw AgentError(ExitCode::kUserDeclined, "user-declined",
                     "sign-in was not approved");
  }
}

RegisterResult Agent::register_identity(const Identity& identity,
                                        std::string_view user_id,
                                        const std::optional<std::string>& registration_token) {
  if (!is_valid_id(user_id)) {
    throw AgentError(ExitCode::kProtocolError, "id-format",
                     "user id must match [A-Za-z0-9._@-]{1,64}");
  }
  RegisterRequest req{std::string(user_id), identity.public_key().to_pem(),
                      registration_token};
  auto result = expect_reply<RegisterResult>(call("/v1/register", req));
  if (!(result.fingerprint == identity.fingerprint())) {
    throw AgentError(ExitCode::kProtocolError, "invalid-key",
                     "server recorded a different fingerprint");
  }
  return result;
}

std::string Agent::sign_and_submit(const Identity& identity, const ChallengeId& id,
                                   const Nonce& nonce, std::string_view service_id,
                                   std::string_view user_id) {
  require_approval(service_id, user_id);
  const SigningPayload payload =
      SigningPayload::build(id, nonce, service_id, user_id);
  AuthSubmission sub{id, identity.fingerprint(),
                     signer_(identity.private_key(), payload.bytes())};
  return expect_reply<AuthResult>(call("/v1/authenticate", sub)).token;
}

std::string Agent::login(const Identity& identity, std::string_view user_id,
                         std::string_view service_id) {
  if (!is_valid_id(user_id) || !is_valid_id(service_id)) {
    throw AgentError(ExitCode::kProtocolError, "id-format",
                     "ids must match [A-Za-z0-9._@-]{1,64}");
  }
  ChallengeRequest req{std::string(user_id), std::string(service_id)};
  const auto reply = expect_reply<ChallengeReply>(call("/v1/challenge", req));
  return sign_and_submit(identity, reply.challenge_id, reply.nonce, service_id, user_id);
}

void Agent::respond(const Identity& identity, const ChallengeParams& params) {
  if (!is_valid_id(params.user_id) || !is_valid_id(params.service_id)) {
    throw AgentError(ExitCode::kProtocolError, "id-format",
                     "ids must match [A-Za-z0-9._@-]{1,64}");
  }
  sign_and_submit(identity, params.challenge_id, params.nonce, params.service_id,
                  params.user_id);
}

}  // namespace keyauth::agent
