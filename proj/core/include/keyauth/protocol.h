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

// Wire messages of the keyauth-1 JSON protocol.
//
// Every message travels inside an envelope
//
//   {"v": "keyauth-1", "type": "<name>", "body": {...}}
//
// Binary fields are unpadded base64url. Decoding is strict: unknown or
// missing fields, ill-typed values and malformed identifiers are rejected
// with the matching ErrorCode.

#ifndef KEYAUTH_PROTOCOL_H_
#define KEYAUTH_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "keyauth/bytes.h"
#include "keyauth/errors.h"

namespace keyauth::protocol {

inline constexpr std::string_view kVersion = "keyauth-1";

// User and service identifiers: ^[A-Za-z0-9._@-]{1,64}$
bool is_valid_id(std::string_view id);

struct ChallengeRequest {
  std::string user_id;
  std::string service_id;
  bool operator==(const ChallengeRequest&) const = default;
};

struct ChallengeReply {
  ChallengeId challenge_id;
  Nonce nonce;
  std::int64_t expires_at = 0;
  PollSecret poll_secret;
  bool operator==(const ChallengeReply&) const = default;
};

struct AuthSubmission {
  ChallengeId challenge_id;
  Fingerprint fingerprint;
  Bytes signature;
  bool operator==(const AuthSubmission&) const = default;
};

struct AuthResult {
  std::string token;
  bool operator==(const AuthResult&) const = default;
};

struct RegisterRequest {
  std::string user_id;
  std::string public_key_pem;
  std::optional<std::string> registration_token;
  bool operator==(const RegisterRequest&) const = default;
};

struct RegisterResult {
  std::string user_id;
  Fingerprint fingerprint;
  bool operator==(const RegisterResult&) const = default;
};

struct PollRequest {
  ChallengeId challenge_id;
  PollSecret poll_secret;
  bool operator==(const PollRequest&) const = default;
};

enum class PollStatus { kPending, kCompleted, kExpired };
std::string_view to_string(PollStatus status);

// `token` is only ever present with kCompleted, and only on the first
// completed poll.
struct PollReply {
  PollStatus status = PollStatus::kPending;
  std::optional<std::string> token;
  bool operator==(const PollReply&) const = default;
};

struct VerifyRequest {
  std::string token;
  bool operator==(const VerifyRequest&) const = default;
};

// Identity fields are present iff valid; `reason` is present iff not.
struct VerifyResult {
  bool valid = false;
  std::optional<std::string> user_id;
  std::optional<std::string> service_id;
  std::optional<std::int64_t> expires_at;
  std::optional<std::string> reason;
  bool operator==(const VerifyResult&) const = default;
};

struct ErrorReply {
  ErrorCode code = ErrorCode::kSchemaViolation;
  std::string message;
  bool operator==(const ErrorReply&) const = default;
};

using Message =
    std::variant<ChallengeRequest, ChallengeReply, AuthSubmission, AuthResult,
                 RegisterRequest, RegisterResult, PollRequest, PollReply,
                 VerifyRequest, VerifyResult, ErrorReply>;

// Wire name carried in the envelope's "type" field.
std::string_view message_type(const Message& message);

// Serializes to compact UTF-8 JSON. Throws std::logic_error for a variant
// left valueless by an exception.
std::string encode_message(const Message& message);

// Strict parse. Throws ProtocolError with one of malformed-json,
// unknown-version, unknown-type, schema-violation or id-format.
Message decode_message(std::string_view raw);

// Extracts a specific message type; anything else is a schema-violation.
template <typename T>
T expect(Message message) {
  if (auto* m = std::get_if<T>(&message)) return std::move(*m);
  throw ProtocolError(ErrorCode::kSchemaViolation,
                      "unexpected message type " +
                          std::string(message_type(message)));
}

// The exact byte string an agent signs for a challenge:
//
//   "keyauth-1" LF b64u(challenge_id) LF b64u(nonce) LF b64u(service_id)
//   LF b64u(user_id)
//
// Each segment is base64url, whose alphabet has no LF, so the encoding is
// injective over (challenge_id, nonce, service_id, user_id).
class SigningPayload {
 public:
  // Throws ProtocolError(id-format) if either id is malformed.
  static SigningPayload build(const ChallengeId& challenge_id,
                              const Nonce& nonce, std::string_view service_id,
                              std::string_view user_id);

  ByteView bytes() const { return as_bytes(text_); }
  const std::string& str() const { return text_; }

  bool operator==(const SigningPayload&) const = default;

 private:
  explicit SigningPayload(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

}  // namespace keyauth::protocol

#endif  // KEYAUTH_PROTOCOL_H_
