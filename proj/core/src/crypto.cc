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

#include "keyauth/crypto.h"

#include <openssl/bio.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <limits>

namespace keyauth::crypto {
namespace {

struct BioDeleter {
  void operator()(BIO* b) const { BIO_free(b); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct Pkcs8Deleter {
  void operator()(PKCS8_PRIV_KEY_INFO* p) const { PKCS8_PRIV_KEY_INFO_free(p); }
};

using BioPtr = std::unique_ptr<BIO, BioDeleter>;

std::shared_ptr<EVP_PKEY> wrap(EVP_PKEY* key) {
  return std::shared_ptr<EVP_PKEY>(key, EVP_PKEY_free);
}

std::string openssl_error() {
  const unsigned long err = ERR_get_error();
  ERR_clear_error();
  if (err == 0) return "unknown OpenSSL error";
  char buf[256];
  ERR_error_string_n(err, buf, sizeof(buf));
  return buf;
}

[[noreturn]] void fail(Errc code, const std::string& what) {
  throw CryptoError(code, what + ": " + openssl_error());
}

BioPtr read_bio(std::string_view data) {
  if (data.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw CryptoError(Errc::kInvalidKey, "key encoding too large");
  }
  BioPtr bio(BIO_new_mem_buf(data.data(), static_cast<int>(data.size())));
  if (!bio) fail(Errc::kCryptoFailure, "BIO_new_mem_buf");
  return bio;
}

std::string drain(BIO* bio) {
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio, &data);
  return std::string(data, static_cast<std::size_t>(len));
}

// Rejects non-RSA keys and moduli outside the allowed set.
std::shared_ptr<EVP_PKEY> checked(EVP_PKEY* raw, const char* what) {
  if (raw == nullptr) fail(Errc::kInvalidKey, what);
  auto key = wrap(raw);
  if (EVP_PKEY_get_base_id(key.get()) != EVP_PKEY_RSA) {
    throw CryptoError(Errc::kInvalidKey, std::string(what) + ": not an RSA key");
  }
  if (!is_supported_modulus(EVP_PKEY_get_bits(key.get()))) {
    throw CryptoError(Errc::kInvalidKey,
                      std::string(what) + ": unsupported modulus size " +
                          std::to_string(EVP_PKEY_get_bits(key.get())));
  }
  return key;
}

int no_password(char*, int, int, void*) { return -1; }

Bytes spki_der(EVP_PKEY* key) {
  const int len = i2d_PUBKEY(key, nullptr);
  if (len <= 0) fail(Errc::kCryptoFailure, "i2d_PUBKEY");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  if (i2d_PUBKEY(key, &p) != len) fail(Errc::kCryptoFailure, "i2d_PUBKEY");
  return out;
}

// Configures a digest-sign/verify context for PSS, SHA-256, salt = 32.
void set_pss(EVP_PKEY_CTX* pctx) {
  if (EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) <= 0 ||
      EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_DIGEST) <= 0 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(pctx, EVP_sha256()) <= 0) {
    fail(Errc::kCryptoFailure, "configuring RSA-PSS");
  }
}

}  // namespace

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kUnsupportedSize: return "unsupported-size";
    case Errc::kInvalidKey: return "invalid-key";
    case Errc::kCryptoFailure: return "crypto-failure";
  }
  return "crypto-failure";
}

bool is_supported_modulus(int bits) {
  return bits == 2048 || bits == 3072 || bits == 4096;
}

PublicKey PublicKey::from_pem(std::string_view pem) {
  BioPtr bio = read_bio(pem);
  return PublicKey(checked(
      PEM_read_bio_PUBKEY(bio.get(), nullptr, no_password, nullptr),
      "parsing public key PEM"));
}

PublicKey PublicKey::from_der(ByteView der) {
  if (der.size() > static_cast<std::size_t>(std::numeric_limits<long>::max())) {
    throw CryptoError(Errc::kInvalidKey, "key encoding too large");
  }
  const unsigned char* p = der.data();
  EVP_PKEY* raw = d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size()));
  auto key = checked(raw, "parsing public key DER");
  if (p != der.data() + der.size()) {
    throw CryptoError(Errc::kInvalidKey, "trailing bytes after public key DER");
  }
  return PublicKey(std::move(key));
}

std::string PublicKey::to_pem() const {
  BioPtr bio(BIO_new(BIO_s_mem()));
  if (!bio || PEM_write_bio_PUBKEY(bio.get(), key_.get()) != 1) {
    fail(Errc::kCryptoFailure, "PEM_write_bio_PUBKEY");
  }
  return drain(bio.get());
}

PublicKey::PublicKey(std::shared_ptr<evp_pkey_st> key)
    : key_(std::move(key)), der_(std::make_shared<const Bytes>(spki_der(key_.get()))) {}

Bytes PublicKey::to_der() const { return *der_; }

int PublicKey::bits() const { return EVP_PKEY_get_bits(key_.get()); }

bool PublicKey::operator==(const PublicKey& other) const {
  return *der_ == *other.der_;
}

PrivateKey PrivateKey::from_pem(std::string_view pem) {
  BioPtr bio = read_bio(pem);
  return PrivateKey(checked(
      PEM_read_bio_PrivateKey(bio.get(), nullptr, no_password, nullptr),
      "parsing private key PEM"));
}

PrivateKey PrivateKey::from_der(ByteView der) {
  if (der.size() > static_cast<std::size_t>(std::numeric_limits<long>::max())) {
    throw CryptoError(Errc::kInvalidKey, "key encoding too large");
  }
  const unsigned char* p = der.data();
  EVP_PKEY* raw = d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(der.size()));
  return PrivateKey(checked(raw, "parsing private key DER"));
}

SecretBytes PrivateKey::to_pkcs8_der() const {
  std::unique_ptr<PKCS8_PRIV_KEY_INFO, Pkcs8Deleter> info(
      EVP_PKEY2PKCS8(key_.get()));
  if (!info) fail(Errc::kCryptoFailure, "EVP_PKEY2PKCS8");
  const int len = i2d_PKCS8_PRIV_KEY_INFO(info.get(), nullptr);
  if (len <= 0) fail(Errc::kCryptoFailure, "i2d_PKCS8_PRIV_KEY_INFO");
  SecretBytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  if (i2d_PKCS8_PRIV_KEY_INFO(info.get(), &p) != len) {
    fail(Errc::kCryptoFailure, "i2d_PKCS8_PRIV_KEY_INFO");
  }
  return out;
}

SecretString PrivateKey::to_pkcs8_pem() const {
  BioPtr bio(BIO_new(BIO_s_secmem()));
  if (!bio || PEM_write_bio_PKCS8PrivateKey(bio.get(), key_.get(), nullptr,
                                            nullptr, 0, nullptr, nullptr) != 1) {
    fail(Errc::kCryptoFailure, "PEM_write_bio_PKCS8PrivateKey");
  }
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio.get(), &data);
  return SecretString(data, static_cast<std::size_t>(len));
}

PublicKey PrivateKey::public_key() const {
  const Bytes der = spki_der(key_.get());
  return PublicKey::from_der(der);
}

int PrivateKey::bits() const { return EVP_PKEY_get_bits(key_.get()); }

KeyPair::KeyPair(PublicKey pub, PrivateKey priv)
    : public_key(std::move(pub)),
      private_key(std::move(priv)),
      bits(private_key.bits()) {
  if (!(private_key.public_key() == public_key)) {
    throw CryptoError(Errc::kInvalidKey,
                      "public key does not match private key");
  }
}

KeyPair::KeyPair(PrivateKey priv)
    : public_key(priv.public_key()),
      private_key(std::move(priv)),
      bits(private_key.bits()) {}

KeyPair generate_keypair(int bits) {
  if (!is_supported_modulus(bits)) {
    throw CryptoError(Errc::kUnsupportedSize,
                      "unsupported modulus size " + std::to_string(bits));
  }
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(
      EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr));
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), bits) <= 0) {
    fail(Errc::kCryptoFailure, "preparing RSA key generation");
  }
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_generate(ctx.get(), &raw) <= 0) {
    fail(Errc::kCryptoFailure, "EVP_PKEY_generate");
  }
  return KeyPair(PrivateKey(wrap(raw)));
}

Signature sign(const PrivateKey& key, ByteView payload) {
  if (payload.empty()) throw std::invalid_argument("refusing to sign an empty payload");
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!ctx || EVP_DigestSignInit(ctx.get(), &pctx, EVP_sha256(), nullptr,
                                 key.handle()) != 1) {
    fail(Errc::kCryptoFailure, "EVP_DigestSignInit");
  }
  set_pss(pctx);
  std::size_t len = 0;
  if (EVP_DigestSign(ctx.get(), nullptr, &len, payload.data(), payload.size()) != 1) {
    fail(Errc::kCryptoFailure, "EVP_DigestSign");
  }
  Signature sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, payload.data(), payload.size()) != 1) {
    fail(Errc::kCryptoFailure, "EVP_DigestSign");
  }
  sig.resize(len);
  return sig;
}

bool verify(const PublicKey& key, ByteView payload, ByteView signature) noexcept {
  try {
    if (signature.size() != key.signature_size()) return false;
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    EVP_PKEY_CTX* pctx = nullptr;
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), &pctx, EVP_sha256(), nullptr,
                                     key.handle()) != 1) {
      ERR_clear_error();
      return false;
    }
    set_pss(pctx);
    const int rc = EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                                    payload.data(), payload.size());
    ERR_clear_error();
    return rc == 1;
  } catch (...) {
    ERR_clear_error();
    return false;
  }
}

Fingerprint fingerprint(const PublicKey& key) {
  const Bytes der = key.to_der();
  std::array<std::uint8_t, Fingerprint::kSize> digest{};
  unsigned int len = 0;
  if (EVP_Digest(der.data(), der.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != digest.size()) {
    fail(Errc::kCryptoFailure, "SHA-256");
  }
  return Fingerprint(digest);
}

Fingerprint fingerprint_pem(std::string_view pem) {
  return fingerprint(PublicKey::from_pem(pem));
}

}  // namespace keyauth::crypto
