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

// Passphrase-sealed storage for the agent's private key.
//
// The key file is a single JSON document:
//
//   {
//     "version": "keystore-1",
//     "kdf": {"name": "scrypt", "n": 32768, "r": 8, "p": 1},
//     "salt": "<16 bytes>",
//     "aead_nonce": "<12 bytes>",
//     "ciphertext": "<AES-256-GCM(PKCS#8 DER) || 16-byte tag>",
//     "fingerprint": "<fingerprint of the public key>"
//   }
//
// Binary fields are unpadded base64url. The AEAD additional data binds the
// version, KDF parameters and fingerprint, so editing any field of the file
// makes it fail to open.

#ifndef KEYAUTH_KEYSTORE_H_
#define KEYAUTH_KEYSTORE_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "keyauth/bytes.h"
#include "keyauth/crypto.h"

namespace keyauth::keystore {

inline constexpr std::string_view kFormatVersion = "keystore-1";

enum class Errc {
  // Wrong passphrase or a modified file; the two are indistinguishable.
  kBadPassphrase,
  kFormatError,
  kCryptoFailure,
  kFileExists,
  kIoError,
};

std::string_view to_string(Errc code);

class KeystoreError : public std::runtime_error {
 public:
  KeystoreError(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

struct ScryptParams {
  std::uint64_t n = 1u << 15;
  std::uint32_t r = 8;
  std::uint32_t p = 1;

  // Interactive-login cost; roughly 32 MiB and a fraction of a second.
  static ScryptParams interactive() { return {}; }

  bool operator==(const ScryptParams&) const = default;
};

// Parameters accepted when opening a file. Bounds the work an attacker-made
// file can demand.
bool is_acceptable(const ScryptParams& params);

using Salt = FixedBytes<16, struct SaltTag>;
using AeadNonce = FixedBytes<12, struct AeadNonceTag>;

struct EncryptedKeyFile {
  ScryptParams kdf;
  Salt salt;
  AeadNonce aead_nonce;
  Bytes ciphertext;
  Fingerprint fingerprint;

  std::string to_json() const;
  // Throws KeystoreError(kFormatError).
  static EncryptedKeyFile from_json(std::string_view text);

  bool operator==(const EncryptedKeyFile&) const = default;
};

// Throws std::invalid_argument for an empty passphrase.
EncryptedKeyFile seal_private_key(const crypto::PrivateKey& key,
                                  std::string_view passphrase,
                                  const ScryptParams& params = ScryptParams::interactive());

// Re-derives with the parameters recorded in `file`. Either returns the key or
// throws; nothing partial is ever returned.
crypto::PrivateKey open_private_key(const EncryptedKeyFile& file,
                                    std::string_view passphrase);

// `$XDG_CONFIG_HOME/keyauth/identity.kskey`, falling back to
// `$HOME/.config/keyauth/identity.kskey`.
std::filesystem::path default_key_path();

// Atomic write-rename with mode 0600. Without `overwrite`, an existing file
// is reported as kFileExists and left untouched.
void write_key_file(const std::filesystem::path& path,
                    const EncryptedKeyFile& file, bool overwrite);

EncryptedKeyFile read_key_file(const std::filesystem::path& path);

}  // namespace keyauth::keystore

#endif  // KEYAUTH_KEYSTORE_H_
