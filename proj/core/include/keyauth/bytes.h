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

#ifndef KEYAUTH_BYTES_H_
#define KEYAUTH_BYTES_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace keyauth {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string_view as_chars(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

// Unpadded base64url (RFC 4648 section 5).
std::string base64url_encode(ByteView data);
inline std::string base64url_encode(std::string_view data) {
  return base64url_encode(as_bytes(data));
}

// Strict decoder: rejects padding, characters outside the url-safe alphabet,
// impossible lengths and non-zero trailing bits, so every byte string has
// exactly one accepted encoding.
std::optional<Bytes> base64url_decode(std::string_view text);

// Fills `out` from the cryptographically secure generator. Throws
// std::runtime_error if the generator fails.
void fill_random(std::span<std::uint8_t> out);

// Overwrites memory in a way the optimizer may not elide.
void secure_zero(void* p, std::size_t n) noexcept;

// Constant-time equality for equal-length inputs; false on length mismatch.
bool constant_time_equal(ByteView a, ByteView b) noexcept;

// Allocator that wipes memory before handing it back.
template <typename T>
struct ZeroizingAllocator {
  using value_type = T;

  ZeroizingAllocator() = default;
  template <typename U>
  ZeroizingAllocator(const ZeroizingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return std::allocator<T>{}.allocate(n); }
  void deallocate(T* p, std::size_t n) noexcept {
    secure_zero(p, n * sizeof(T));
    std::allocator<T>{}.deallocate(p, n);
  }

  template <typename U>
  bool operator==(const ZeroizingAllocator<U>&) const noexcept {
    return true;
  }
};

using SecretBytes = std::vector<std::uint8_t, ZeroizingAllocator<std::uint8_t>>;
using SecretString =
    std::basic_string<char, std::char_traits<char>, ZeroizingAllocator<char>>;

// Fixed-length binary value. The tag keeps e.g. a challenge id from being
// passed where a poll secret is expected.
template <std::size_t N, typename Tag>
class FixedBytes {
 public:
  static constexpr std::size_t kSize = N;

  FixedBytes() { data_.fill(0); }
  explicit FixedBytes(const std::array<std::uint8_t, N>& data) : data_(data) {}

  static FixedBytes random() {
    FixedBytes out;
    fill_random(out.data_);
    return out;
  }

  static std::optional<FixedBytes> from_bytes(ByteView b) {
    if (b.size() != N) return std::nullopt;
    FixedBytes out;
    std::copy(b.begin(), b.end(), out.data_.begin());
    return out;
  }

  static std::optional<FixedBytes> from_base64url(std::string_view text) {
    auto raw = base64url_decode(text);
    if (!raw) return std::nullopt;
    return from_bytes(*raw);
  }

  std::string to_base64url() const { return base64url_encode(view()); }
  ByteView view() const { return data_; }
  std::span<std::uint8_t, N> mutable_view() { return data_; }

  bool operator==(const FixedBytes&) const = default;

 private:
  std::array<std::uint8_t, N> data_;
};

using ChallengeId = FixedBytes<16, struct ChallengeIdTag>;
using Nonce = FixedBytes<32, struct NonceTag>;
using PollSecret = FixedBytes<16, struct PollSecretTag>;
using TokenId = FixedBytes<16, struct TokenIdTag>;
// SHA-256 over the DER SubjectPublicKeyInfo of a public key.
using Fingerprint = FixedBytes<32, struct FingerprintTag>;

}  // namespace keyauth

#endif  // KEYAUTH_BYTES_H_
