// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "triauth/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <set>

#include "triauth/encoding.hpp"
#include "triauth/error.hpp"

namespace triauth::crypto {

namespace {

void ensure_sodium() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) throw Error(errc::signing_failure, "sodium_init failed");
  });
}

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

template <std::size_t N>
std::array<std::uint8_t, N> decode_fixed(std::string_view text, errc code,
                                         const char* what) {
  std::vector<std::uint8_t> raw;
  try {
    raw = b64url_decode(text);
  } catch (const Error&) {
    throw Error(code, std::string(what) + ": not valid base64url");
  }
  if (raw.size() != N) throw Error(code, std::string(what) + ": wrong length");
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

}  // namespace

std::string Digest::to_b64url() const { return b64url_encode(bytes); }
std::string Digest::to_hex() const { return hex_encode(bytes); }

Digest Digest::from_b64url(std::string_view text) {
  return Digest{decode_fixed<32>(text, errc::bad_encoding, "digest")};
}

bool PublicKey::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
}

std::string PublicKey::to_b64url() const { return b64url_encode(bytes); }

PublicKey PublicKey::from_b64url(std::string_view text) {
  return PublicKey{decode_fixed<32>(text, errc::malformed_key, "public key")};
}

std::string PrivateKey::to_b64url() const { return b64url_encode(bytes); }

PrivateKey PrivateKey::from_b64url(std::string_view text) {
  return PrivateKey{decode_fixed<64>(text, errc::malformed_key, "private key")};
}

bool Signature::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
}

std::string Signature::to_b64url() const { return b64url_encode(bytes); }

Signature Signature::from_b64url(std::string_view text) {
  return Signature{
      decode_fixed<64>(text, errc::malformed_signature, "signature")};
}

std::vector<std::uint8_t> canonical_encode(const CanonicalRecord& record) {
  if (record.fields.empty()) throw Error(errc::empty_record);

  std::set<std::string_view> seen;
  std::size_t total = 0;
  for (const auto& [label, value] : record.fields) {
    if (!seen.insert(label).second) {
      throw Error(errc::duplicate_label, "canonical record: repeated label '" +
                                             label + "'");
    }
    total += 8 + label.size() + value.size();
  }

  std::vector<std::uint8_t> out;
  out.reserve(total);
  for (const auto& [label, value] : record.fields) {
    append_u32_be(out, static_cast<std::uint32_t>(label.size()));
    out.insert(out.end(), label.begin(), label.end());
    append_u32_be(out, static_cast<std::uint32_t>(value.size()));
    out.insert(out.end(), value.begin(), value.end());
  }
  return out;
}

Digest sha256(std::span<const std::uint8_t> data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

Digest sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

KeyPair keygen(std::optional<std::span<const std::uint8_t>> seed,
               std::string key_id) {
  ensure_sodium();
  KeyPair pair;
  pair.key_id = std::move(key_id);
  if (seed) {
    if (seed->size() != crypto_sign_SEEDBYTES) {
      throw Error(errc::bad_seed_length,
                  "keygen: seed must be exactly 32 bytes");
    }
    crypto_sign_seed_keypair(pair.public_key.bytes.data(),
                             pair.private_key.bytes.data(), seed->data());
  } else {
    crypto_sign_keypair(pair.public_key.bytes.data(),
                        pair.private_key.bytes.data());
  }
  return pair;
}

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> data) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, data.data(), data.size(),
                       key.bytes.data());
  return sig;
}

Signature sign(const PrivateKey& key, std::string_view data) {
  return sign(key, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(data.data()),
                       data.size()));
}

bool verify(const PublicKey& key, std::span<const std::uint8_t> data,
            const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), data.data(),
                                     data.size(), key.bytes.data()) == 0;
}

bool verify(const PublicKey& key, std::string_view data, const Signature& sig) {
  return verify(key,
                std::span<const std::uint8_t>(
                    reinterpret_cast<const std::uint8_t*>(data.data()),
                    data.size()),
                sig);
}

Rng Rng::system() {
  ensure_sodium();
  return Rng(false, {});
}

Rng Rng::seeded(const std::array<std::uint8_t, 32>& seed) {
  ensure_sodium();
  return Rng(true, seed);
}

Rng Rng::seeded_from_string(std::string_view text) {
  return seeded(sha256(text).bytes);
}

void Rng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (!seeded_) {
    randombytes_buf(out.data(), out.size());
    return;
  }
  // One ChaCha20 keystream range per call; the 8-byte little-endian call
  // counter is the stream nonce, so call order alone determines the output.
  std::uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
  std::uint64_t c = counter_++;
  for (int i = 0; i < 8; ++i) {
    nonce[i] = static_cast<std::uint8_t>((c >> (8 * i)) & 0xff);
  }
  crypto_stream_chacha20(out.data(), out.size(), nonce, key_.data());
}

std::vector<std::uint8_t> Rng::bytes(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  fill(out);
  return out;
}

std::array<std::uint8_t, 16> Rng::bytes16() {
  std::array<std::uint8_t, 16> out{};
  fill(out);
  return out;
}

std::array<std::uint8_t, 32> Rng::bytes32() {
  std::array<std::uint8_t, 32> out{};
  fill(out);
  return out;
}

std::string Rng::token(std::size_t n) { return b64url_encode(bytes(n)); }

}  // namespace triauth::crypto
