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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "triauth/crypto.hpp"
#include "triauth/ledger.hpp"

namespace triauth::vcred {

enum class Status { active, revoked };

// Issuer-key and credential-status lookup authority. Issuer registration is
// write-once; status transitions only active -> revoked.
class DataRegistry {
 public:
  virtual ~DataRegistry() = default;

  // Throws duplicate_issuer.
  virtual void register_issuer(const std::string& issuer_id,
                               const crypto::PublicKey& key) = 0;
  virtual std::optional<crypto::PublicKey> find_issuer(
      const std::string& issuer_id) const = 0;

  // Registers a fresh status id as active.
  virtual void add_status(const std::string& status_id) = 0;
  virtual std::optional<Status> status(const std::string& status_id) const = 0;

  // Permanent. Throws unknown_status_id; revoking twice is a no-op.
  virtual void revoke(const std::string& status_id) = 0;
};

class MemoryRegistry final : public DataRegistry {
 public:
  void register_issuer(const std::string& issuer_id,
                       const crypto::PublicKey& key) override;
  std::optional<crypto::PublicKey> find_issuer(
      const std::string& issuer_id) const override;
  void add_status(const std::string& status_id) override;
  std::optional<Status> status(const std::string& status_id) const override;
  void revoke(const std::string& status_id) override;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, crypto::PublicKey> issuers_;
  std::map<std::string, Status> status_;
};

// JSON document on disk; every mutation rewrites the file.
class FileRegistry final : public DataRegistry {
 public:
  explicit FileRegistry(std::filesystem::path path);

  void register_issuer(const std::string& issuer_id,
                       const crypto::PublicKey& key) override;
  std::optional<crypto::PublicKey> find_issuer(
      const std::string& issuer_id) const override;
  void add_status(const std::string& status_id) override;
  std::optional<Status> status(const std::string& status_id) const override;
  void revoke(const std::string& status_id) override;

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, crypto::PublicKey> issuers_;
  std::map<std::string, Status> status_;

  void load();
  void save() const;
};

// Registry state lives in the "vc-registry" contract on a ledger; writes are
// submitted transactions under the given authorization.
class LedgerRegistry final : public DataRegistry {
 public:
  LedgerRegistry(ledger::Ledger& ledger, ledger::TxAuth auth);

  void register_issuer(const std::string& issuer_id,
                       const crypto::PublicKey& key) override;
  std::optional<crypto::PublicKey> find_issuer(
      const std::string& issuer_id) const override;
  void add_status(const std::string& status_id) override;
  std::optional<Status> status(const std::string& status_id) const override;
  void revoke(const std::string& status_id) override;

 private:
  ledger::Ledger* ledger_;
  ledger::TxAuth auth_;
};

struct VerifiableCredential {
  std::string id;
  std::string issuer_id;
  crypto::PublicKey holder_public_key;
  // Commitment digests only, in issued order: hash of
  // canonical_encode([(label, value), ("salt", base64url(salt))]).
  std::vector<crypto::Digest> commitments;
  std::int64_t valid_from = 0;
  std::int64_t valid_until = 0;
  std::string status_id;
  crypto::Signature issuer_signature;

  std::vector<std::uint8_t> signing_bytes() const;
  std::string to_json() const;
  static VerifiableCredential from_json(const std::string& text);
};

struct AttributeSecret {
  std::string value;
  std::array<std::uint8_t, 16> salt{};
};

// The holder-side view: label -> (value, salt). Never leaves the holder
// except through explicit disclosure.
using AttributeStore = std::map<std::string, AttributeSecret>;

std::string attribute_store_json(const AttributeStore& store);
AttributeStore attribute_store_from_json(const std::string& text);

crypto::Digest commitment_digest(const std::string& label,
                                 const std::string& value,
                                 const std::array<std::uint8_t, 16>& salt);

struct Issuance {
  VerifiableCredential credential;
  AttributeStore attributes;
};

struct DisclosedAttribute {
  std::string label;
  std::string value;
  std::array<std::uint8_t, 16> salt{};
};

struct Presentation {
  VerifiableCredential credential;
  std::vector<DisclosedAttribute> disclosed;
  std::string challenge;
  crypto::Signature holder_signature;

  std::vector<std::uint8_t> signing_bytes() const;
  std::string to_json() const;
  static Presentation from_json(const std::string& text);
};

struct VerifyReport {
  bool valid = false;
  std::map<std::string, std::string> disclosed;
  std::vector<std::string> reasons;
};

// Issues a credential with one fresh-salted commitment per attribute and a
// newly registered active status id. The label "salt" is reserved. Throws
// unknown_issuer (also when the registered key differs), empty_attributes,
// bad_validity.
Issuance issue_credential(const crypto::KeyPair& issuer_key,
                          const std::string& issuer_id,
                          const crypto::PublicKey& holder_public_key,
                          const std::map<std::string, std::string>& attributes,
                          std::int64_t valid_from, std::int64_t valid_until,
                          DataRegistry& registry, crypto::Rng& rng);

// Builds a presentation disclosing exactly the given labels; everything else
// stays a commitment digest. Throws unknown_label, wrong_holder_key.
Presentation derive_presentation(const VerifiableCredential& credential,
                                 const crypto::KeyPair& holder_key,
                                 const std::set<std::string>& disclose,
                                 const std::string& challenge,
                                 const AttributeStore& attributes);

// Runs every check and reports all failures; never throws on a negative
// outcome. Validity window is valid_from <= now < valid_until.
VerifyReport verify_presentation(const Presentation& presentation,
                                 const DataRegistry& registry,
                                 const std::string& expected_challenge,
                                 std::int64_t now);

// Throws unknown_status_id.
void revoke_credential(DataRegistry& registry, const std::string& status_id);

}  // namespace triauth::vcred
