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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace triauth::crypto {

// SHA-256 output.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  bool operator==(const Digest&) const = default;
  auto operator<=>(const Digest&) const = default;

  std::string to_b64url() const;
  std::string to_hex() const;
  static Digest from_b64url(std::string_view text);  // throws bad_encoding
};

// Ed25519 verification key (32 bytes).
struct PublicKey {
  std::array<std::uint8_t, 32> bytes{};

  bool operator==(const PublicKey&) const = default;
  auto operator<=>(const PublicKey&) const = default;

  bool is_zero() const;
  std::string to_b64url() const;
  static PublicKey from_b64url(std::string_view text);  // throws malformed_key
};

// Ed25519 signing key in libsodium layout (seed || public key).
struct PrivateKey {
  std::array<std::uint8_t, 64> bytes{};

  std::string to_b64url() const;
  static PrivateKey from_b64url(std::string_view text);  // throws malformed_key
};

// Detached Ed25519 signature (64 bytes).
struct Signature {
  std::array<std::uint8_t, 64> bytes{};

  bool operator==(const Signature&) const = default;

  bool is_zero() const;
  std::string to_b64url() const;
  static Signature from_b64url(std::string_view text);  // throws malformed_signature
};

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
  std::string key_id;
};

// An ordered list of (label, value) fields. Order is the declaration order
// and labels must be unique; canonical_encode rejects violations.
struct CanonicalRecord {
  std::vector<std::pair<std::string, std::string>> fields;

  CanonicalRecord() = default;
  CanonicalRecord(
      std::initializer_list<std::pair<std::string, std::string>> init)
      : fields(init) {}

  CanonicalRecord& add(std::string label, std::string value) {
    fields.emplace_back(std::move(label), std::move(value));
    return *this;
  }
};

// Injective byte encoding: for each field in order, the 4-byte big-endian
// length of the label, the label, the 4-byte big-endian length of the value,
// the value. Distinct records always produce distinct byte sequences.
// Throws empty_record for zero fields, duplicate_label on repeated labels.
std::vector<std::uint8_t> canonical_encode(const CanonicalRecord& record);

// SHA-256 per FIPS 180-4.
Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

// Ed25519 key generation. With a seed the result is deterministic (same seed,
// same pair); without one the system CSPRNG is used. A seed of any length
// other than 32 bytes is rejected with bad_seed_length.
KeyPair keygen(std::optional<std::span<const std::uint8_t>> seed,
               std::string key_id);

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> data);
Signature sign(const PrivateKey& key, std::string_view data);

// True iff sig is a valid signature of data under key. Never throws on a
// merely wrong signature; any bit flip in data or sig yields false.
bool verify(const PublicKey& key, std::span<const std::uint8_t> data,
            const Signature& sig);
bool verify(const PublicKey& key, std::string_view data, const Signature& sig);

// Byte source used wherever the toolkit needs randomness (salts, token ids,
// nonces). Seeded instances draw from a ChaCha20 stream and are fully
// reproducible; system instances draw from the OS CSPRNG. Operations never
// read ambient entropy directly: they take an Rng, so every caller can pin
// determinism.
class Rng {
 public:
  static Rng system();
  static Rng seeded(const std::array<std::uint8_t, 32>& seed);
  // Convenience: seed = sha256(text).
  static Rng seeded_from_string(std::string_view text);

  void fill(std::span<std::uint8_t> out);
  std::vector<std::uint8_t> bytes(std::size_t n);
  std::array<std::uint8_t, 16> bytes16();
  std::array<std::uint8_t, 32> bytes32();
  // base64url of n random bytes; the workhorse for fresh ids.
  std::string token(std::size_t n = 16);

 private:
  Rng(bool seeded, std::array<std::uint8_t, 32> key)
      : seeded_(seeded), key_(key) {}

  bool seeded_;
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t counter_ = 0;
};

}  // namespace triauth::crypto
