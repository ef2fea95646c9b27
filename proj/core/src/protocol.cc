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

#include "keyauth/protocol.h"

#include <nlohmann/json.hpp>

#include <set>
#include <stdexcept>

namespace keyauth::protocol {
namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  throw ProtocolError(ErrorCode::kSchemaViolation, what);
}

// Reads fields out of a message body and remembers which ones were seen so
// that leftovers can be rejected.
class BodyReader {
 public:
  explicit BodyReader(const json& body) : body_(body) {
    if (!body_.is_object()) schema_error("body must be a JSON object");
  }

  bool has(const char* key) const { return body_.contains(key); }

  std::string string(const char* key) {
    const json& v = field(key);
    if (!v.is_string()) schema_error(std::string(key) + " must be a string");
    return v.get<std::string>();
  }

  std::string nonempty_string(const char* key) {
    std::string s = string(key);
    if (s.empty()) schema_error(std::string(key) + " must not be empty");
    return s;
  }

  std::string id(const char* key) {
    std::string s = string(key);
    if (!is_valid_id(s)) {
      throw ProtocolError(ErrorCode::kIdFormat,
                          std::string(key) + " is not a valid identifier");
    }
    return s;
  }

  template <typename Fixed>
  Fixed fixed(const char* key) {
    auto value = Fixed::from_base64url(string(key));
    if (!value) {
      schema_error(std::string(key) + " must be " +
                   std::to_string(Fixed::kSize) + " bytes of base64url");
    }
    return *value;
  }

  Bytes binary(const char* key) {
    auto value = base64url_decode(string(key));
    if (!value || value->empty()) {
      schema_error(std::string(key) + " must be non-empty base64url");
    }
    return *std::move(value);
  }

  std::int64_t integer(const char* key) {
    const json& v = field(key);
    if (!v.is_number_integer()) {
      schema_error(std::string(key) + " must be an integer");
    }
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() >
            static_cast<std::uint64_t>(INT64_MAX)) {
      schema_error(std::string(key) + " is out of range");
    }
    return v.get<std::int64_t>();
  }

  bool boolean(const char* key) {
    const json& v = field(key);
    if (!v.is_boolean()) schema_error(std::string(key) + " must be a boolean");
    return v.get<bool>();
  }

  void finish() const {
    for (const auto& item : body_.items()) {
      if (!seen_.count(item.key())) {
        schema_error("unexpected field " + item.key());
      }
    }
  }

 private:
  const json& field(const char* key) {
    auto it = body_.find(key);
    if (it == body_.end()) schema_error(std::string("missing field ") + key);
    seen_.insert(key);
    return *it;
  }

  const json& body_;
  std::set<std::string> seen_;
};

json to_body(const ChallengeRequest& m) {
  return {{"user_id", m.user_id}, {"service_id", m.service_id}};
}
json to_body(const ChallengeReply& m) {
  return {{"challenge_id", m.challenge_id.to_base64url()},
          {"nonce", m.nonce.to_base64url()},
          {"expires_at", m.expires_at},
          {"poll_secret", m.poll_secret.to_base64url()}};
}
json to_body(const AuthSubmission& m) {
  return {{"challenge_id", m.challenge_id.to_base64url()},
          {"fingerprint", m.fingerprint.to_base64url()},
          {"signature", base64url_encode(ByteView(m.signature))}};
}
json to_body(const AuthResult& m) { return {{"token", m.token}}; }
json to_body(const RegisterRequest& m) {
  json body = {{"user_id", m.user_id}, {"public_key_pem", m.public_key_pem}};
  if (m.registration_token) body["registration_token"] = *m.registration_token;
  return body;
}
json to_body(const RegisterResult& m) {
  return {{"user_id", m.user_id},
          {"fingerprint", m.fingerprint.to_base64url()}};
}
json to_body(const PollRequest& m) {
  return {{"challenge_id", m.challenge_id.to_base64url()},
          {"poll_secret", m.poll_secret.to_base64url()}};
}
json to_body(const PollReply& m) {
  json body = {{"status", to_string(m.status)}};
  if (m.token) body["token"] = *m.token;
  return body;
}
json to_body(const VerifyRequest& m) { return {{"token", m.token}}; }
json to_body(const VerifyResult& m) {
  json body = {{"valid", m.valid}};
  if (m.user_id) body["user_id"] = *m.user_id;
  if (m.service_id) body["service_id"] = *m.service_id;
  if (m.expires_at) body["expires_at"] = *m.expires_at;
  if (m.reason) body["reason"] = *m.reason;
  return body;
}
json to_body(const ErrorReply& m) {
  return {{"code", to_string(m.code)}, {"message", m.message}};
}

ChallengeRequest read_challenge_request(BodyReader& r) {
  ChallengeRequest m;
  m.user_id = r.id("user_id");
  m.service_id = r.id("service_id");
  return m;
}
ChallengeReply read_challenge_reply(BodyReader& r) {
  ChallengeReply m;
  m.challenge_id = r.fixed<ChallengeId>("challenge_id");
  m.nonce = r.fixed<Nonce>("nonce");
  m.expires_at = r.integer("expires_at");
  m.poll_secret = r.fixed<PollSecret>("poll_secret");
  return m;
}
AuthSubmission read_auth_submission(BodyReader& r) {
  AuthSubmission m;
  m.challenge_id = r.fixed<ChallengeId>("challenge_id");
  m.fingerprint = r.fixed<Fingerprint>("fingerprint");
  m.signature = r.binary("signature");
  return m;
}
AuthResult read_auth_result(BodyReader& r) {
  return AuthResult{r.nonempty_string("token")};
}
RegisterRequest read_register_request(BodyReader& r) {
  RegisterRequest m;
  m.user_id = r.id("user_id");
  m.public_key_pem = r.nonempty_string("public_key_pem");
  if (r.has("registration_token")) {
    m.registration_token = r.string("registration_token");
  }
  return m;
}
RegisterResult read_register_result(BodyReader& r) {
  RegisterResult m;
  m.user_id = r.id("user_id");
  m.fingerprint = r.fixed<Fingerprint>("fingerprint");
  return m;
}
PollRequest read_poll_request(BodyReader& r) {
  PollRequest m;
  m.challenge_id = r.fixed<ChallengeId>("challenge_id");
  m.poll_secret = r.fixed<PollSecret>("poll_secret");
  return m;
}
PollReply read_poll_reply(BodyReader& r) {
  PollReply m;
  const std::string status = r.string("status");
  if (status == "pending") {
    m.status = PollStatus::kPending;
  } else if (status == "completed") {
    m.status = PollStatus::kCompleted;
  } else if (status == "expired") {
    m.status = PollStatus::kExpired;
  } else {
    schema_error("unknown poll status " + status);
  }
  if (r.has("token")) {
    if (m.status != PollStatus::kCompleted) {
      schema_error("token is only allowed with status completed");
    }
    m.token = r.nonempty_string("token");
  }
  return m;
}
VerifyRequest read_verify_request(BodyReader& r) {
  return VerifyRequest{r.nonempty_string("token")};
}
VerifyResult read_verify_result(BodyReader& r) {
  VerifyResult m;
  m.valid = r.boolean("valid");
  if (m.valid) {
    m.user_id = r.id("user_id");
    m.service_id = r.id("service_id");
    m.expires_at = r.integer("expires_at");
  } else {
    m.reason = r.nonempty_string("reason");
  }
  return m;
}
ErrorReply read_error_reply(BodyReader& r) {
  ErrorReply m;
  const std::string code = r.string("code");
  auto parsed = parse_error_code(code);
  if (!parsed) schema_error("unknown error code " + code);
  m.code = *parsed;
  m.message = r.string("message");
  return m;
}

struct TypeEntry {
  std::string_view name;
  Message (*read)(BodyReader&);
};

template <auto Fn>
Message read_as(BodyReader& r) {
  return Fn(r);
}

// Order matches the alternatives of Message.
constexpr TypeEntry kTypes[] = {
    {"challenge-request", &read_as<read_challenge_request>},
    {"challenge-reply", &read_as<read_challenge_reply>},
    {"auth-submission", &read_as<read_auth_submission>},
    {"auth-result", &read_as<read_auth_result>},
    {"register-request", &read_as<read_register_request>},
    {"register-result", &read_as<read_register_result>},
    {"poll-request", &read_as<read_poll_request>},
    {"poll-reply", &read_as<read_poll_reply>},
    {"verify-request", &read_as<read_verify_request>},
    {"verify-result", &read_as<read_verify_result>},
    {"error", &read_as<read_error_reply>},
};
static_assert(std::size(kTypes) == std::variant_size_v<Message>);

}  // namespace

bool is_valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                    c == '@' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string_view to_string(PollStatus status) {
  switch (status) {
    case PollStatus::kPending: return "pending";
    case PollStatus::kCompleted: return "completed";
    case PollStatus::kExpired: return "expired";
  }
  return "pending";
}

std::string_view message_type(const Message& message) {
  if (message.valueless_by_exception()) return "invalid";
  return kTypes[message.index()].name;
}

std::string encode_message(const Message& message) {
  if (message.valueless_by_exception()) {
    throw std::logic_error("cannot encode a valueless message");
  }
  json envelope = {
      {"v", kVersion},
      {"type", message_type(message)},
      {"body", std::visit([](const auto& m) { return to_body(m); }, message)},
  };
  return envelope.dump(-1, ' ', false, json::error_handler_t::replace);
}

Message decode_message(std::string_view raw) {
  json envelope;
  try {
    envelope = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ProtocolError(ErrorCode::kMalformedJson, e.what());
  }
  if (!envelope.is_object()) schema_error("envelope must be a JSON object");

  auto v = envelope.find("v");
  if (v == envelope.end()) schema_error("missing field v");
  if (!v->is_string() || v->get<std::string>() != kVersion) {
    throw ProtocolError(ErrorCode::kUnknownVersion,
                        "unsupported protocol version " + v->dump());
  }

  auto type = envelope.find("type");
  if (type == envelope.end() || !type->is_string()) {
    schema_error("missing or non-string field type");
  }
  auto body = envelope.find("body");
  if (body == envelope.end()) schema_error("missing field body");
  if (envelope.size() != 3) schema_error("unexpected envelope field");

  const std::string name = type->get<std::string>();
  for (const TypeEntry& entry : kTypes) {
    if (entry.name == name) {
      BodyReader reader(*body);
      Message message = entry.read(reader);
      reader.finish();
      return message;
    }
  }
  throw ProtocolError(ErrorCode::kUnknownType, "unknown message type " + name);
}

SigningPayload SigningPayload::build(const ChallengeId& challenge_id,
                                     const Nonce& nonce,
                                     std::string_view service_id,
                                     std::string_view user_id) {
  if (!is_valid_id(service_id) || !is_valid_id(user_id)) {
    throw ProtocolError(ErrorCode::kIdFormat,
                        "signing payload identifiers are malformed");
  }
  std::string text;
  text.reserve(160);
  text.append(kVersion);
  text.push_back('\n');
  text.append(challenge_id.to_base64url());
  text.push_back('\n');
  text.append(nonce.to_base64url());
  text.push_back('\n');
  text.append(base64url_encode(service_id));
  text.push_back('\n');
  text.append(base64url_encode(user_id));
  return SigningPayload(std::move(text));
}

}  // namespace keyauth::protocol
