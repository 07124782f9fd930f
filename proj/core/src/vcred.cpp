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

#include "triauth/vcred.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "triauth/encoding.hpp"
#include "triauth/error.hpp"

namespace triauth::vcred {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string decimal(std::int64_t v) { return std::to_string(v); }

}  // namespace

// ---------------------------------------------------------------------------
// MemoryRegistry

void MemoryRegistry::register_issuer(const std::string& issuer_id,
                                     const crypto::PublicKey& key) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = issuers_.emplace(issuer_id, key);
  (void)it;
  if (!inserted) throw Error(errc::duplicate_issuer, issuer_id);
}

std::optional<crypto::PublicKey> MemoryRegistry::find_issuer(
    const std::string& issuer_id) const {
  std::shared_lock lock(mutex_);
  auto it = issuers_.find(issuer_id);
  if (it == issuers_.end()) return std::nullopt;
  return it->second;
}

void MemoryRegistry::add_status(const std::string& status_id) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = status_.emplace(status_id, Status::active);
  (void)it;
  if (!inserted) throw Error(errc::bad_transaction, "status id already present");
}

std::optional<Status> MemoryRegistry::status(
    const std::string& status_id) const {
  std::shared_lock lock(mutex_);
  auto it = status_.find(status_id);
  if (it == status_.end()) return std::nullopt;
  return it->second;
}

void MemoryRegistry::revoke(const std::string& status_id) {
  std::unique_lock lock(mutex_);
  auto it = status_.find(status_id);
  if (it == status_.end()) throw Error(errc::unknown_status_id, status_id);
  it->second = Status::revoked;
}

// ---------------------------------------------------------------------------
// FileRegistry

FileRegistry::FileRegistry(std::filesystem::path path)
    : path_(std::move(path)) {
  load();
}

void FileRegistry::load() {
  std::unique_lock lock(mutex_);
  issuers_.clear();
  status_.clear();
  if (!std::filesystem::exists(path_)) return;
  std::ifstream in(path_, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw Error(errc::corrupt_workspace, path_.string());
  ordered_json doc = ordered_json::parse(buf.str(), nullptr, false);
  if (!doc.is_object() || !doc.contains("issuers") || !doc.contains("status") ||
      !doc["issuers"].is_object() || !doc["status"].is_object())
    throw Error(errc::corrupt_workspace, path_.string());
  for (const auto& [id, pk] : doc["issuers"].items()) {
    if (!pk.is_string()) throw Error(errc::corrupt_workspace, path_.string());
    try {
      issuers_.emplace(id,
                       crypto::PublicKey::from_b64url(pk.get<std::string>()));
    } catch (const Error&) {
      throw Error(errc::corrupt_workspace, path_.string());
    }
  }
  for (const auto& [id, st] : doc["status"].items()) {
    if (!st.is_string()) throw Error(errc::corrupt_workspace, path_.string());
    const std::string s = st.get<std::string>();
    if (s == "active")
      status_.emplace(id, Status::active);
    else if (s == "revoked")
      status_.emplace(id, Status::revoked);
    else
      throw Error(errc::corrupt_workspace, path_.string());
  }
}

void FileRegistry::save() const {
  ordered_json doc = ordered_json::object();
  ordered_json issuers = ordered_json::object();
  for (const auto& [id, pk] : issuers_) issuers[id] = pk.to_b64url();
  ordered_json status = ordered_json::object();
  for (const auto& [id, st] : status_)
    status[id] = st == Status::active ? "active" : "revoked";
  doc["issuers"] = std::move(issuers);
  doc["status"] = std::move(status);
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out.good()) throw Error(errc::corrupt_workspace, path_.string());
}

void FileRegistry::register_issuer(const std::string& issuer_id,
                                   const crypto::PublicKey& key) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = issuers_.emplace(issuer_id, key);
  (void)it;
  if (!inserted) throw Error(errc::duplicate_issuer, issuer_id);
  save();
}

std::optional<crypto::PublicKey> FileRegistry::find_issuer(
    const std::string& issuer_id) const {
  std::shared_lock lock(mutex_);
  auto it = issuers_.find(issuer_id);
  if (it == issuers_.end()) return std::nullopt;
  return it->second;
}

void FileRegistry::add_status(const std::string& status_id) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = status_.emplace(status_id, Status::active);
  (void)it;
  if (!inserted) throw Error(errc::bad_transaction, "status id already present");
  save();
}

std::optional<Status> FileRegistry::status(const std::string& status_id) const {
  std::shared_lock lock(mutex_);
  auto it = status_.find(status_id);
  if (it == status_.end()) return std::nullopt;
  return it->second;
}

void FileRegistry::revoke(const std::string& status_id) {
  std::unique_lock lock(mutex_);
  auto it = status_.find(status_id);
  if (it == status_.end()) throw Error(errc::unknown_status_id, status_id);
  it->second = Status::revoked;
  save();
}

// ---------------------------------------------------------------------------
// LedgerRegistry

namespace {

constexpr const char* kRegistryContract = "vc-registry";

[[noreturn]] void throw_registry_rejection(const ledger::Receipt& receipt) {
  if (auto code = errc_from_name(receipt.reason))
    throw Error(*code, receipt.reason);
  throw Error(errc::bad_transaction, receipt.reason);
}

}  // namespace

LedgerRegistry::LedgerRegistry(ledger::Ledger& ledger, ledger::TxAuth auth)
    : ledger_(&ledger), auth_(std::move(auth)) {}

void LedgerRegistry::register_issuer(const std::string& issuer_id,
                                     const crypto::PublicKey& key) {
  auto receipt = ledger::submit_as(*ledger_, auth_, kRegistryContract,
                                   "register_issuer",
                                   {issuer_id, key.to_b64url()});
  if (!receipt.accepted) throw_registry_rejection(receipt);
}

std::optional<crypto::PublicKey> LedgerRegistry::find_issuer(
    const std::string& issuer_id) const {
  try {
    auto result = ledger_->query(auth_.channel, kRegistryContract,
                                 "get_issuer", {issuer_id});
    return crypto::PublicKey::from_b64url(result.value);
  } catch (const Error& e) {
    if (e.code() == errc::unknown_issuer) return std::nullopt;
    throw;
  }
}

void LedgerRegistry::add_status(const std::string& status_id) {
  auto receipt = ledger::submit_as(*ledger_, auth_, kRegistryContract,
                                   "add_status", {status_id});
  if (!receipt.accepted) throw_registry_rejection(receipt);
}

std::optional<Status> LedgerRegistry::status(
    const std::string& status_id) const {
  try {
    auto result = ledger_->query(auth_.channel, kRegistryContract,
                                 "get_status", {status_id});
    if (result.value == "active") return Status::active;
    if (result.value == "revoked") return Status::revoked;
    throw Error(errc::broken_chain, "unexpected status value");
  } catch (const Error& e) {
    if (e.code() == errc::unknown_status_id) return std::nullopt;
    throw;
  }
}

void LedgerRegistry::revoke(const std::string& status_id) {
  auto receipt = ledger::submit_as(*ledger_, auth_, kRegistryContract,
                                   "revoke_status", {status_id});
  if (!receipt.accepted) throw_registry_rejection(receipt);
}

// ---------------------------------------------------------------------------
// Credential and presentation shapes

crypto::Digest commitment_digest(const std::string& label,
                                 const std::string& value,
                                 const std::array<std::uint8_t, 16>& salt) {
  crypto::CanonicalRecord record;
  record.add(label, value);
  record.add("salt", b64url_encode(salt));
  return crypto::sha256(crypto::canonical_encode(record));
}

std::vector<std::uint8_t> VerifiableCredential::signing_bytes() const {
  crypto::CanonicalRecord record;
  record.add("id", id);
  record.add("issuer", issuer_id);
  record.add("holder", holder_public_key.to_b64url());
  for (std::size_t i = 0; i < commitments.size(); ++i)
    record.add("c" + std::to_string(i), commitments[i].to_b64url());
  record.add("from", decimal(valid_from));
  record.add("until", decimal(valid_until));
  record.add("status", status_id);
  return crypto::canonical_encode(record);
}

std::string VerifiableCredential::to_json() const {
  ordered_json doc;
  doc["id"] = id;
  doc["issuer_id"] = issuer_id;
  doc["holder_public_key"] = holder_public_key.to_b64url();
  ordered_json cs = ordered_json::array();
  for (const auto& c : commitments) cs.push_back(c.to_b64url());
  doc["commitments"] = std::move(cs);
  doc["valid_from"] = valid_from;
  doc["valid_until"] = valid_until;
  doc["status_id"] = status_id;
  doc["issuer_signature"] = issuer_signature.to_b64url();
  return doc.dump();
}

namespace {

[[noreturn]] void bad_document(const char* what) {
  throw Error(errc::bad_encoding, what);
}

const ordered_json& field(const ordered_json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) bad_document(key);
  return *it;
}

std::string string_field(const ordered_json& doc, const char* key) {
  const auto& v = field(doc, key);
  if (!v.is_string()) bad_document(key);
  return v.get<std::string>();
}

std::int64_t int_field(const ordered_json& doc, const char* key) {
  const auto& v = field(doc, key);
  if (!v.is_number_integer()) bad_document(key);
  return v.get<std::int64_t>();
}

}  // namespace

VerifiableCredential VerifiableCredential::from_json(const std::string& text) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (!doc.is_object()) bad_document("credential");
  VerifiableCredential cred;
  cred.id = string_field(doc, "id");
  cred.issuer_id = string_field(doc, "issuer_id");
  cred.holder_public_key =
      crypto::PublicKey::from_b64url(string_field(doc, "holder_public_key"));
  const auto& cs = field(doc, "commitments");
  if (!cs.is_array()) bad_document("commitments");
  for (const auto& c : cs) {
    if (!c.is_string()) bad_document("commitments");
    cred.commitments.push_back(
        crypto::Digest::from_b64url(c.get<std::string>()));
  }
  cred.valid_from = int_field(doc, "valid_from");
  cred.valid_until = int_field(doc, "valid_until");
  cred.status_id = string_field(doc, "status_id");
  cred.issuer_signature =
      crypto::Signature::from_b64url(string_field(doc, "issuer_signature"));
  return cred;
}

std::string attribute_store_json(const AttributeStore& store) {
  ordered_json doc = ordered_json::object();
  for (const auto& [label, secret] : store) {
    ordered_json entry;
    entry["value"] = secret.value;
    entry["salt"] = b64url_encode(secret.salt);
    doc[label] = std::move(entry);
  }
  return doc.dump();
}

AttributeStore attribute_store_from_json(const std::string& text) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (!doc.is_object()) bad_document("attribute store");
  AttributeStore store;
  for (const auto& [label, entry] : doc.items()) {
    if (!entry.is_object()) bad_document("attribute store");
    AttributeSecret secret;
    secret.value = string_field(entry, "value");
    auto salt = b64url_decode(string_field(entry, "salt"));
    if (salt.size() != secret.salt.size()) bad_document("salt");
    std::copy(salt.begin(), salt.end(), secret.salt.begin());
    store.emplace(label, std::move(secret));
  }
  return store;
}

std::vector<std::uint8_t> Presentation::signing_bytes() const {
  crypto::CanonicalRecord record;
  record.add("id", credential.id);
  for (std::size_t i = 0; i < disclosed.size(); ++i) {
    const auto& d = disclosed[i];
    record.add("label" + std::to_string(i), d.label);
    record.add("value" + std::to_string(i), d.value);
    record.add("salt" + std::to_string(i), b64url_encode(d.salt));
  }
  record.add("challenge", challenge);
  return crypto::canonical_encode(record);
}

std::string Presentation::to_json() const {
  ordered_json doc;
  doc["credential"] = ordered_json::parse(credential.to_json());
  ordered_json ds = ordered_json::array();
  for (const auto& d : disclosed) {
    ordered_json entry;
    entry["label"] = d.label;
    entry["value"] = d.value;
    entry["salt"] = b64url_encode(d.salt);
    ds.push_back(std::move(entry));
  }
  doc["disclosed"] = std::move(ds);
  doc["challenge"] = challenge;
  doc["holder_signature"] = holder_signature.to_b64url();
  return doc.dump();
}

Presentation Presentation::from_json(const std::string& text) {
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (!doc.is_object()) bad_document("presentation");
  Presentation pres;
  const auto& cred = field(doc, "credential");
  if (!cred.is_object()) bad_document("credential");
  pres.credential = VerifiableCredential::from_json(cred.dump());
  const auto& ds = field(doc, "disclosed");
  if (!ds.is_array()) bad_document("disclosed");
  for (const auto& entry : ds) {
    if (!entry.is_object()) bad_document("disclosed");
    DisclosedAttribute d;
    d.label = string_field(entry, "label");
    d.value = string_field(entry, "value");
    auto salt = b64url_decode(string_field(entry, "salt"));
    if (salt.size() != d.salt.size()) bad_document("salt");
    std::copy(salt.begin(), salt.end(), d.salt.begin());
    pres.disclosed.push_back(std::move(d));
  }
  pres.challenge = string_field(doc, "challenge");
  pres.holder_signature =
      crypto::Signature::from_b64url(string_field(doc, "holder_signature"));
  return pres;
}

// ---------------------------------------------------------------------------
// Operations

Issuance issue_credential(const crypto::KeyPair& issuer_key,
                          const std::string& issuer_id,
                          const crypto::PublicKey& holder_public_key,
                          const std::map<std::string, std::string>& attributes,
                          std::int64_t valid_from, std::int64_t valid_until,
                          DataRegistry& registry, crypto::Rng& rng) {
  if (attributes.empty()) throw Error(errc::empty_attributes);
  if (attributes.count("salt"))
    throw Error(errc::duplicate_label, "salt is reserved");
  if (valid_from >= valid_until)
    throw Error(errc::bad_validity, "valid_from must precede valid_until");
  auto registered = registry.find_issuer(issuer_id);
  if (!registered || registered->bytes != issuer_key.public_key.bytes)
    throw Error(errc::unknown_issuer, issuer_id);

  VerifiableCredential cred;
  cred.id = "vc-" + rng.token(16);
  cred.issuer_id = issuer_id;
  cred.holder_public_key = holder_public_key;
  cred.valid_from = valid_from;
  cred.valid_until = valid_until;
  cred.status_id = "st-" + rng.token(16);

  AttributeStore store;
  for (const auto& [label, value] : attributes) {
    AttributeSecret secret;
    secret.value = value;
    secret.salt = rng.bytes16();
    cred.commitments.push_back(commitment_digest(label, value, secret.salt));
    store.emplace(label, std::move(secret));
  }

  registry.add_status(cred.status_id);
  cred.issuer_signature =
      crypto::sign(issuer_key.private_key, cred.signing_bytes());
  return Issuance{std::move(cred), std::move(store)};
}

Presentation derive_presentation(const VerifiableCredential& credential,
                                 const crypto::KeyPair& holder_key,
                                 const std::set<std::string>& disclose,
                                 const std::string& challenge,
                                 const AttributeStore& attributes) {
  if (holder_key.public_key.bytes != credential.holder_public_key.bytes)
    throw Error(errc::wrong_holder_key);
  Presentation pres;
  pres.credential = credential;
  for (const auto& label : disclose) {
    auto it = attributes.find(label);
    if (it == attributes.end()) throw Error(errc::unknown_label, label);
    pres.disclosed.push_back(
        DisclosedAttribute{label, it->second.value, it->second.salt});
  }
  pres.challenge = challenge;
  pres.holder_signature =
      crypto::sign(holder_key.private_key, pres.signing_bytes());
  return pres;
}

VerifyReport verify_presentation(const Presentation& presentation,
                                 const DataRegistry& registry,
                                 const std::string& expected_challenge,
                                 std::int64_t now) {
  VerifyReport report;
  const auto& cred = presentation.credential;

  auto issuer_key = registry.find_issuer(cred.issuer_id);
  if (!issuer_key) {
    report.reasons.push_back("unknown issuer");
  } else if (!crypto::verify(*issuer_key, cred.signing_bytes(),
                             cred.issuer_signature)) {
    report.reasons.push_back("issuer signature invalid");
  }

  bool commitments_ok = true;
  for (const auto& d : presentation.disclosed) {
    auto digest = commitment_digest(d.label, d.value, d.salt);
    bool found = false;
    for (const auto& c : cred.commitments) {
      if (c.bytes == digest.bytes) {
        found = true;
        break;
      }
    }
    if (!found) commitments_ok = false;
  }
  if (!commitments_ok) report.reasons.push_back("commitment mismatch");

  if (!crypto::verify(cred.holder_public_key, presentation.signing_bytes(),
                      presentation.holder_signature))
    report.reasons.push_back("holder signature invalid");

  if (presentation.challenge != expected_challenge)
    report.reasons.push_back("challenge mismatch");

  if (now < cred.valid_from)
    report.reasons.push_back("not yet valid");
  else if (now >= cred.valid_until)
    report.reasons.push_back("expired");

  auto status = registry.status(cred.status_id);
  if (!status)
    report.reasons.push_back("unknown status");
  else if (*status == Status::revoked)
    report.reasons.push_back("revoked");

  report.valid = report.reasons.empty();
  if (report.valid)
    for (const auto& d : presentation.disclosed)
      report.disclosed.emplace(d.label, d.value);
  return report;
}

void revoke_credential(DataRegistry& registry, const std::string& status_id) {
  registry.revoke(status_id);
}

}  // namespace triauth::vcred
