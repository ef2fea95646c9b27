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

#include "keyauth/keystore.h"

#include <openssl/err.h>
#include <openssl/evp.h>

#include <cerrno>
#include <cstdlib>
#include <limits>
#include <nlohmann/json.hpp>
#include <system_error>

#include "file_util.h"

namespace keyauth::keystore {
namespace {

using json = nlohmann::json;

constexpr std::size_t kKeySize = 32;
constexpr std::size_t kTagSize = 16;

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

[[noreturn]] void format_error(const std::string& what) {
  throw KeystoreError(Errc::kFormatError, what);
}

[[noreturn]] void crypto_failure(const std::string& what) {
  ERR_clear_error();
  throw KeystoreError(Errc::kCryptoFailure, what);
}

std::string associated_data(const ScryptParams& kdf, const Fingerprint& fp) {
  return std::string(kFormatVersion) + "\nscrypt " + std::to_string(kdf.n) +
         " " + std::to_string(kdf.r) + " " + std::to_string(kdf.p) + "\n" +
         fp.to_base64url();
}

SecretBytes derive_key(std::string_view passphrase, const Salt& salt,
                       const ScryptParams& kdf) {
  SecretBytes key(kKeySize);
  const std::uint64_t maxmem =
      128ull * kdf.r * (kdf.n + kdf.p + 2) + (1ull << 20);
  if (EVP_PBE_scrypt(passphrase.data(), passphrase.size(), salt.view().data(),
                     salt.view().size(), kdf.n, kdf.r, kdf.p, maxmem,
                     key.data(), key.size()) != 1) {
    crypto_failure("scrypt key derivation failed");
  }
  return key;
}

CipherCtx gcm_context(bool encrypt, const SecretBytes& key,
                      const AeadNonce& nonce) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) crypto_failure("EVP_CIPHER_CTX_new");
  const int ok =
      encrypt ? EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr,
                                   key.data(), nonce.view().data())
              : EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr,
                                   key.data(), nonce.view().data());
  if (ok != 1) crypto_failure("AES-256-GCM init");
  return ctx;
}

int checked_int(std::size_t n) {
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    format_error("field too large");
  }
  return static_cast<int>(n);
}

template <typename Fixed>
Fixed read_fixed(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) {
    format_error(std::string("missing or non-string field ") + key);
  }
  auto value = Fixed::from_base64url(it->get<std::string>());
  if (!value) format_error(std::string("malformed field ") + key);
  return *value;
}

std::uint64_t read_uint(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_unsigned()) {
    format_error(std::string("kdf.") + key + " must be a positive integer");
  }
  return it->get<std::uint64_t>();
}

}  // namespace

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kBadPassphrase: return "bad-passphrase";
    case Errc::kFormatError: return "format-error";
    case Errc::kCryptoFailure: return "crypto-failure";
    case Errc::kFileExists: return "file-exists";
    case Errc::kIoError: return "io-error";
  }
  return "format-error";
}

bool is_acceptable(const ScryptParams& params) {
  const bool pow2 = params.n >= 2 && (params.n & (params.n - 1)) == 0;
  return pow2 && params.n <= (1u << 20) && params.r >= 1 && params.r <= 32 &&
         params.p >= 1 && params.p <= 16 &&
         128ull * params.r * params.n <= (1ull << 30);
}

std::string EncryptedKeyFile::to_json() const {
  json doc = {
      {"version", kFormatVersion},
      {"kdf", {{"name", "scrypt"}, {"n", kdf.n}, {"r", kdf.r}, {"p", kdf.p}}},
      {"salt", salt.to_base64url()},
      {"aead_nonce", aead_nonce.to_base64url()},
      {"ciphertext", base64url_encode(ByteView(ciphertext))},
      {"fingerprint", fingerprint.to_base64url()},
  };
  return doc.dump(2) + "\n";
}

EncryptedKeyFile EncryptedKeyFile::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    format_error(std::string("key file is not JSON: ") + e.what());
  }
  if (!doc.is_object()) format_error("key file must be a JSON object");
  if (doc.size() != 6) format_error("key file has unexpected fields");

  auto version = doc.find("version");
  if (version == doc.end() || !version->is_string() ||
      version->get<std::string>() != kFormatVersion) {
    format_error("unsupported key file version");
  }

  auto kdf = doc.find("kdf");
  if (kdf == doc.end() || !kdf->is_object() || kdf->size() != 4) {
    format_error("malformed kdf block");
  }
  auto name = kdf->find("name");
  if (name == kdf->end() || *name != "scrypt") format_error("unsupported kdf");

  EncryptedKeyFile file;
  const std::uint64_t r = read_uint(*kdf, "r");
  const std::uint64_t p = read_uint(*kdf, "p");
  file.kdf.n = read_uint(*kdf, "n");
  if (r > 1024 || p > 1024) format_error("kdf parameters out of range");
  file.kdf.r = static_cast<std::uint32_t>(r);
  file.kdf.p = static_cast<std::uint32_t>(p);
  if (!is_acceptable(file.kdf)) format_error("kdf parameters out of range");

  file.salt = read_fixed<Salt>(doc, "salt");
  file.aead_nonce = read_fixed<AeadNonce>(doc, "aead_nonce");
  file.fingerprint = read_fixed<Fingerprint>(doc, "fingerprint");

  auto ct = doc.find("ciphertext");
  if (ct == doc.end() || !ct->is_string()) format_error("missing ciphertext");
  auto raw = base64url_decode(ct->get<std::string>());
  if (!raw || raw->size() <= kTagSize) format_error("malformed ciphertext");
  file.ciphertext = *std::move(raw);
  return file;
}

EncryptedKeyFile seal_private_key(const crypto::PrivateKey& key,
                                  std::string_view passphrase,
                                  const ScryptParams& params) {
  if (passphrase.empty()) throw std::invalid_argument("empty passphrase");
  if (!is_acceptable(params)) throw std::invalid_argument("bad scrypt parameters");

  EncryptedKeyFile file;
  file.kdf = params;
  file.salt = Salt::random();
  file.aead_nonce = AeadNonce::random();
  file.fingerprint = crypto::fingerprint(key.public_key());

  const SecretBytes plain = key.to_pkcs8_der();
  const SecretBytes aead_key = derive_key(passphrase, file.salt, file.kdf);
  const std::string aad = associated_data(file.kdf, file.fingerprint);

  CipherCtx ctx = gcm_context(true, aead_key, file.aead_nonce);
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), nullptr, &len,
                        reinterpret_cast<const unsigned char*>(aad.data()),
                        checked_int(aad.size())) != 1) {
    crypto_failure("GCM additional data");
  }
  file.ciphertext.resize(plain.size() + kTagSize);
  if (EVP_EncryptUpdate(ctx.get(), file.ciphertext.data(), &len, plain.data(),
                        checked_int(plain.size())) != 1) {
    crypto_failure("GCM encrypt");
  }
  std::size_t written = static_cast<std::size_t>(len);
  if (EVP_EncryptFinal_ex(ctx.get(), file.ciphertext.data() + written, &len) != 1) {
    crypto_failure("GCM finalize");
  }
  written += static_cast<std::size_t>(len);
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize,
                          file.ciphertext.data() + written) != 1) {
    crypto_failure("GCM tag");
  }
  file.ciphertext.resize(written + kTagSize);
  return file;
}

crypto::PrivateKey open_private_key(const EncryptedKeyFile& file,
                                    std::string_view passphrase) {
  if (!is_acceptable(file.kdf)) format_error("kdf parameters out of range");
  if (file.ciphertext.size() <= kTagSize) format_error("ciphertext too short");

  const SecretBytes aead_key = derive_key(passphrase, file.salt, file.kdf);
  const std::string aad = associated_data(file.kdf, file.fingerprint);
  const std::size_t body = file.ciphertext.size() - kTagSize;

  CipherCtx ctx = gcm_context(false, aead_key, file.aead_nonce);
  int len = 0;
  if (EVP_DecryptUpdate(ctx.get(), nullptr, &len,
                        reinterpret_cast<const unsigned char*>(aad.data()),
                        checked_int(aad.size())) != 1) {
    crypto_failure("GCM additional data");
  }
  SecretBytes plain(body);
  if (EVP_DecryptUpdate(ctx.get(), plain.data(), &len, file.ciphertext.data(),
                        checked_int(body)) != 1) {
    crypto_failure("GCM decrypt");
  }
  std::size_t produced = static_cast<std::size_t>(len);
  Bytes tag(file.ciphertext.begin() + static_cast<std::ptrdiff_t>(body),
            file.ciphertext.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()) != 1) {
    crypto_failure("GCM tag");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + produced, &len) != 1) {
    ERR_clear_error();
    throw KeystoreError(Errc::kBadPassphrase,
                        "wrong passphrase or corrupted key file");
  }
  produced += static_cast<std::size_t>(len);
  plain.resize(produced);

  try {
    crypto::PrivateKey key = crypto::PrivateKey::from_der(plain);
    if (!(crypto::fingerprint(key.public_key()) == file.fingerprint)) {
      format_error("sealed key does not match the recorded fingerprint");
    }
    return key;
  } catch (const crypto::CryptoError& e) {
    format_error(std::string("sealed key is unusable: ") + e.what());
  }
}

std::filesystem::path default_key_path() {
  std::filesystem::path base;
  if (const char* xdg = std::getenv("XDG_CONFIG_HOME"); xdg && *xdg) {
    base = xdg;
  } else if (const char* home = std::getenv("HOME"); home && *home) {
    base = std::filesystem::path(home) / ".config";
  } else {
    base = ".";
  }
  return base / "keyauth" / "identity.kskey";
}

void write_key_file(const std::filesystem::path& path,
                    const EncryptedKeyFile& file, bool overwrite) {
  try {
    internal::ensure_private_directory(path.parent_path());
    if (overwrite) {
      internal::atomic_write_file(path, file.to_json(), 0600);
    } else {
      internal::atomic_create_file(path, file.to_json(), 0600);
    }
  } catch (const std::system_error& e) {
    if (e.code() == std::errc::file_exists) {
      throw KeystoreError(Errc::kFileExists,
                          "key file already exists: " + path.string());
    }
    throw KeystoreError(Errc::kIoError, e.what());
  }
}

EncryptedKeyFile read_key_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = internal::read_file(path);
  } catch (const std::system_error& e) {
    throw KeystoreError(Errc::kIoError, e.what());
  }
  return EncryptedKeyFile::from_json(text);
}

}  // namespace keyauth::keystore
