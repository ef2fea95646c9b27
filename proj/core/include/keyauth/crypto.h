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

// RSA key handling for KeyAuth. Signatures are RSASSA-PSS with SHA-256 and a
// salt as long as the digest; all primitives come from OpenSSL.
//
// Key values are immutable handles and may be shared between threads. This
// module never writes key material anywhere; see keystore.h for that.

#ifndef KEYAUTH_CRYPTO_H_
#define KEYAUTH_CRYPTO_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "keyauth/bytes.h"

struct evp_pkey_st;

namespace keyauth::crypto {

enum class Errc {
  kUnsupportedSize,
  kInvalidKey,
  kCryptoFailure,
};

std::string_view to_string(Errc code);

class CryptoError : public std::runtime_error {
 public:
  CryptoError(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline constexpr int kDefaultModulusBits = 3072;

// 2048, 3072 or 4096.
bool is_supported_modulus(int bits);

using Signature = Bytes;

struct KeyPair;

class PublicKey {
 public:
  // SubjectPublicKeyInfo, PEM or DER. Throws CryptoError(kInvalidKey) for
  // anything that is not an RSA key of a supported size.
  static PublicKey from_pem(std::string_view pem);
  static PublicKey from_der(ByteView der);

  std::string to_pem() const;
  Bytes to_der() const;

  int bits() const;
  std::size_t signature_size() const { return static_cast<std::size_t>(bits() + 7) / 8; }

  evp_pkey_st* handle() const { return key_.get(); }

  // Equality of the encoded public key.
  bool operator==(const PublicKey& other) const;

 private:
  explicit PublicKey(std::shared_ptr<evp_pkey_st> key);
  friend class PrivateKey;

  std::shared_ptr<evp_pkey_st> key_;
  // Encoding is costly with OpenSSL 3 providers; done once.
  std::shared_ptr<const Bytes> der_;
};

class PrivateKey {
 public:
  // PKCS#8, PEM or DER (unencrypted).
  static PrivateKey from_pem(std::string_view pem);
  static PrivateKey from_der(ByteView der);

  // Plain PKCS#8 encodings for sealing by the keystore or for the daemon's
  // own key file. Callers own keeping these off shared media.
  SecretBytes to_pkcs8_der() const;
  SecretString to_pkcs8_pem() const;

  PublicKey public_key() const;
  int bits() const;

  evp_pkey_st* handle() const { return key_.get(); }

 private:
  explicit PrivateKey(std::shared_ptr<evp_pkey_st> key) : key_(std::move(key)) {}
  friend struct KeyPair;
  friend KeyPair generate_keypair(int bits);

  std::shared_ptr<evp_pkey_st> key_;
};

struct KeyPair {
  // Throws CryptoError(kInvalidKey) unless `public_key` is the public half of
  // `private_key`.
  KeyPair(PublicKey public_key, PrivateKey private_key);
  explicit KeyPair(PrivateKey private_key);

  PublicKey public_key;
  PrivateKey private_key;
  int bits;
};

// Fresh key pair, public exponent 65537. Throws CryptoError(kUnsupportedSize).
KeyPair generate_keypair(int bits = kDefaultModulusBits);

// Throws std::invalid_argument on an empty payload, CryptoError on provider
// failure.
Signature sign(const PrivateKey& key, ByteView payload);

// Never throws; malformed signatures simply fail to verify.
bool verify(const PublicKey& key, ByteView payload, ByteView signature) noexcept;

Fingerprint fingerprint(const PublicKey& key);

// Parses then fingerprints; CryptoError(kInvalidKey) on undecodable input.
Fingerprint fingerprint_pem(std::string_view pem);

}  // namespace keyauth::crypto

#endif  // KEYAUTH_CRYPTO_H_
