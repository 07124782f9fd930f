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

#include "triauth/harness.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <sstream>

#include <nlohmann/json.hpp>

#include "triauth/cert_contract.hpp"
#include "triauth/crypto.hpp"
#include "triauth/encoding.hpp"
#include "triauth/error.hpp"
#include "triauth/jose.hpp"
#include "triauth/ledger.hpp"
#include "triauth/scitokens.hpp"
#include "triauth/vc_bridge.hpp"
#include "triauth/vcred.hpp"

namespace triauth::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string> kCriteria = {
    "trust",    "revocation",   "privacy",        "security",
    "validity", "verification", "authentication", "functionality"};
const std::vector<std::string> kMechanisms = {"scitokens", "vc", "contract"};

crypto::Rng scenario_rng(const std::string& name) {
  auto digest = crypto::sha256("triauth.harness/" + name);
  return crypto::Rng::seeded(digest.bytes);
}

crypto::KeyPair make_key(crypto::Rng& rng, const std::string& id) {
  auto seed = rng.bytes32();
  return crypto::keygen(std::span<const std::uint8_t>(seed), id);
}

ledger::TxAuth auth_of(const crypto::KeyPair& sender) {
  ledger::TxAuth auth;
  auth.sender = sender;
  return auth;
}

// Observed strings are "check=value" pairs joined with ';'. Values never
// contain either separator: reason strings use spaces and commas only.
class Observed {
 public:
  void add(std::string_view check, std::string_view value) {
    if (!text_.empty()) text_ += ';';
    text_ += check;
    text_ += '=';
    text_ += value;
  }
  void add_bool(std::string_view check, bool value) {
    add(check, value ? "true" : "false");
  }
  std::string str() && { return std::move(text_); }

 private:
  std::string text_;
};

template <class F>
std::string op_value(F&& fn) {
  try {
    fn();
    return "ok";
  } catch (const Error& e) {
    return std::string(errc_name(e.code()));
  }
}

std::string join_reasons(const std::vector<std::string>& reasons) {
  std::string out;
  for (const auto& r : reasons) {
    if (!out.empty()) out += ',';
    out += r;
  }
  return out;
}

std::string report_value(const vcred::VerifyReport& report) {
  return report.valid ? "ok" : join_reasons(report.reasons);
}

std::string bridge_value(const bridge::BridgeReport& report) {
  return report.valid ? "ok" : join_reasons(report.reasons);
}

std::string outcome_value(const cert::VerifyOutcome& outcome) {
  return outcome.valid ? "ok" : outcome.reason;
}

std::string token_value(const std::string& token,
                        const crypto::PublicKey& key, std::int64_t now,
                        const std::optional<std::string>& aud = std::nullopt) {
  return op_value(
      [&] { scitokens::verify_access_token(token, key, now, aud); });
}

// ---------------------------------------------------------------------------
// scitokens scenarios

std::string sc_trust_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  auto other = make_key(rng, "other-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto token = ti.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                     kT0);

  Observed obs;
  obs.add("verify_under_issuer", token_value(token, issuer.public_key, kT0));
  obs.add("verify_under_other_key",
          token_value(token, other.public_key, kT0));

  auto jws = jose::decode(token);
  auto payload = jws.payload;
  payload["sub"] = "mallory";
  auto tampered = jws.header_b64 + "." + b64url_encode(payload.dump()) + "." +
                  jws.signature.to_b64url();
  obs.add("tampered", token_value(tampered, issuer.public_key, kT0));
  return std::move(obs).str();
}

std::string sc_revocation_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto access = ti.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                      kT0);
  auto refresh = ti.issue_refresh_token("alice", {"read:/data"}, kT0);

  Observed obs;
  obs.add("refresh", op_value([&] { ti.refresh(refresh.id, kT0 + 10); }));
  ti.revoke_refresh(refresh.id);
  obs.add("after_revoke",
          op_value([&] { ti.refresh(refresh.id, kT0 + 20); }));
  // Revocation cuts off renewal only; the already-issued access token rides
  // out its own lifetime.
  obs.add("access_before_exp",
          token_value(access, issuer.public_key, kT0 + 599));
  obs.add("access_after_exp",
          token_value(access, issuer.public_key, kT0 + 600));
  return std::move(obs).str();
}

std::string sc_privacy_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto token = ti.issue_access_token("alice", {"read:/data/alice"},
                                     std::nullopt, kT0);

  Observed obs;
  // No key material involved: the claims are readable by anyone holding the
  // token string.
  auto jws = jose::decode(token);
  obs.add_bool("payload_readable_without_key", true);
  obs.add("sub", jws.payload.at("sub").get<std::string>());
  obs.add("scope", jws.payload.at("scope").get<std::string>());
  return std::move(obs).str();
}

std::string sc_security_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto token = ti.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                     kT0);

  Observed obs;
  // Possession is the only credential: a replaying third party verifies.
  obs.add("bearer_replay", token_value(token, issuer.public_key, kT0 + 1));

  auto jws = jose::decode(token);
  auto payload = jws.payload;
  payload["scope"] = "write:/";
  auto tampered = jws.header_b64 + "." + b64url_encode(payload.dump()) + "." +
                  jws.signature.to_b64url();
  obs.add("tampered", token_value(tampered, issuer.public_key, kT0 + 1));

  ordered_json header;
  header["alg"] = "none";
  header["typ"] = "JWT";
  header["kid"] = issuer.key_id;
  auto downgraded =
      jose::compact_sign(header, jws.payload, issuer.private_key);
  obs.add("alg_none", token_value(downgraded, issuer.public_key, kT0 + 1));
  return std::move(obs).str();
}

std::string sc_validity_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");

  ordered_json header;
  header["alg"] = "EdDSA";
  header["typ"] = "JWT";
  header["kid"] = issuer.key_id;
  ordered_json payload;
  payload["iss"] = "issuer.example";
  payload["sub"] = "alice";
  payload["scope"] = "read:/data";
  payload["nbf"] = kT0 + 100;
  payload["iat"] = kT0;
  payload["exp"] = kT0 + 600;
  payload["jti"] = rng.token(16);
  auto token = jose::compact_sign(header, payload, issuer.private_key);

  Observed obs;
  obs.add("before_nbf", token_value(token, issuer.public_key, kT0 + 50));
  obs.add("within_window", token_value(token, issuer.public_key, kT0 + 150));
  obs.add("at_exp", token_value(token, issuer.public_key, kT0 + 600));
  return std::move(obs).str();
}

std::string sc_verification_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto plain = ti.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                     kT0);
  auto scoped = ti.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                      kT0, std::string("disk.example"));

  Observed obs;
  // The verifier holds nothing but the issuer public key; no registry or
  // ledger is consulted.
  obs.add("offline_with_public_key",
          token_value(plain, issuer.public_key, kT0 + 1));
  obs.add("wrong_audience", token_value(scoped, issuer.public_key, kT0 + 1,
                                        std::string("tape.example")));
  obs.add("matching_audience",
          token_value(scoped, issuer.public_key, kT0 + 1,
                      std::string("disk.example")));
  return std::move(obs).str();
}

std::string sc_authentication_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto token = ti.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                     kT0);
  auto claims =
      scitokens::verify_access_token(token, issuer.public_key, kT0 + 1);

  Observed obs;
  obs.add("sub", claims.sub);
  obs.add("iss", claims.iss);
  obs.add_bool("read_allowed",
               scitokens::authorize(
                   claims, {scitokens::Action::read, "/data/file1"}));
  obs.add_bool("write_denied",
               !scitokens::authorize(
                   claims, {scitokens::Action::write, "/data/file1"}));
  return std::move(obs).str();
}

std::string sc_functionality_scitokens(crypto::Rng& rng) {
  auto issuer = make_key(rng, "issuer-key");
  scitokens::TokenIssuer ti("issuer.example", issuer,
                            crypto::Rng::seeded(rng.bytes32()));
  auto token = ti.issue_access_token("alice", {"write:/data/alice"},
                                     std::nullopt, kT0);
  auto claims =
      scitokens::verify_access_token(token, issuer.public_key, kT0 + 1);

  auto allowed = [&](scitokens::Action action, const char* path) {
    return scitokens::authorize(claims, {action, path});
  };
  Observed obs;
  obs.add_bool("write_target",
               allowed(scitokens::Action::write, "/data/alice/run1"));
  obs.add_bool("read_implied",
               allowed(scitokens::Action::read, "/data/alice/run1"));
  obs.add_bool("sibling_prefix",
               allowed(scitokens::Action::read, "/data/alicex"));
  obs.add_bool("unrelated", allowed(scitokens::Action::read, "/data/bob"));
  return std::move(obs).str();
}

// ---------------------------------------------------------------------------
// vc scenarios

const std::map<std::string, std::string> kStudentAttributes = {
    {"name", "alice"}, {"program", "CS"}, {"gpa", "3.90"}};

std::string sc_trust_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto wrong = make_key(rng, "wrong-key");
  auto holder = make_key(rng, "holder-key");

  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0, kT0 + 1000, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder, {"name"},
                                         "challenge-1", issued.attributes);

  Observed obs;
  obs.add("registered_issuer",
          report_value(vcred::verify_presentation(pres, registry,
                                                  "challenge-1", kT0 + 1)));

  vcred::MemoryRegistry unregistered;
  unregistered.add_status(issued.credential.status_id);
  obs.add("unregistered",
          report_value(vcred::verify_presentation(pres, unregistered,
                                                  "challenge-1", kT0 + 1)));

  vcred::MemoryRegistry mismatched;
  mismatched.register_issuer("registrar", wrong.public_key);
  mismatched.add_status(issued.credential.status_id);
  obs.add("key_mismatch",
          report_value(vcred::verify_presentation(pres, mismatched,
                                                  "challenge-1", kT0 + 1)));
  return std::move(obs).str();
}

std::string sc_revocation_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0, kT0 + 1000, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder, {"name"},
                                         "challenge-1", issued.attributes);

  Observed obs;
  obs.add("before", report_value(vcred::verify_presentation(
                        pres, registry, "challenge-1", kT0 + 1)));
  vcred::revoke_credential(registry, issued.credential.status_id);
  obs.add("after_revoke", report_value(vcred::verify_presentation(
                              pres, registry, "challenge-1", kT0 + 2)));
  vcred::revoke_credential(registry, issued.credential.status_id);
  obs.add("revoke_again", report_value(vcred::verify_presentation(
                              pres, registry, "challenge-1", kT0 + 3)));
  return std::move(obs).str();
}

std::string sc_privacy_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0, kT0 + 1000, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder, {"name"},
                                         "challenge-1", issued.attributes);
  auto report =
      vcred::verify_presentation(pres, registry, "challenge-1", kT0 + 1);

  std::string disclosed;
  for (const auto& [label, value] : report.disclosed) {
    (void)value;
    if (!disclosed.empty()) disclosed += ',';
    disclosed += label;
  }

  Observed obs;
  obs.add("disclosed", disclosed);
  obs.add_bool("gpa_in_report", report.disclosed.count("gpa") != 0);
  // Undisclosed values exist only as salted commitments; the raw bytes never
  // appear in the wire form.
  obs.add_bool("gpa_bytes_in_presentation",
               pres.to_json().find("3.90") != std::string::npos);
  return std::move(obs).str();
}

std::string sc_security_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  auto attacker = make_key(rng, "attacker-key");
  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0, kT0 + 1000, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder,
                                         {"name", "gpa"}, "challenge-1",
                                         issued.attributes);

  Observed obs;
  obs.add("honest", report_value(vcred::verify_presentation(
                        pres, registry, "challenge-1", kT0 + 1)));
  // Same presentation replayed against a different verifier challenge.
  obs.add("challenge_replay", report_value(vcred::verify_presentation(
                                  pres, registry, "challenge-2", kT0 + 1)));

  auto forged = pres;
  for (auto& d : forged.disclosed)
    if (d.label == "gpa") d.value = "4.00";
  forged.holder_signature =
      crypto::sign(attacker.private_key, forged.signing_bytes());
  obs.add("tampered_value", report_value(vcred::verify_presentation(
                                forged, registry, "challenge-1", kT0 + 1)));
  return std::move(obs).str();
}

std::string sc_validity_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0 + 100, kT0 + 200, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder, {"name"},
                                         "challenge-1", issued.attributes);

  Observed obs;
  obs.add("before_window", report_value(vcred::verify_presentation(
                               pres, registry, "challenge-1", kT0 + 50)));
  obs.add("within", report_value(vcred::verify_presentation(
                        pres, registry, "challenge-1", kT0 + 150)));
  obs.add("at_until", report_value(vcred::verify_presentation(
                          pres, registry, "challenge-1", kT0 + 200)));
  return std::move(obs).str();
}

std::string sc_verification_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  auto operator_key = make_key(rng, "operator-key");

  auto run_backend = [&](vcred::DataRegistry& registry) {
    registry.register_issuer("registrar", issuer.public_key);
    auto issued = vcred::issue_credential(issuer, "registrar",
                                          holder.public_key,
                                          kStudentAttributes, kT0, kT0 + 1000,
                                          registry, rng);
    auto pres = vcred::derive_presentation(issued.credential, holder,
                                           {"name"}, "challenge-1",
                                           issued.attributes);
    return report_value(
        vcred::verify_presentation(pres, registry, "challenge-1", kT0 + 1));
  };

  Observed obs;
  {
    vcred::MemoryRegistry registry;
    obs.add("memory", run_backend(registry));
  }
  {
    static std::atomic<unsigned> counter{0};
    auto path = std::filesystem::temp_directory_path() /
                ("triauth-harness-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++) + ".json");
    std::filesystem::remove(path);
    {
      vcred::FileRegistry registry(path);
      obs.add("file", run_backend(registry));
    }
    std::filesystem::remove(path);
  }
  {
    auto lgr = ledger::Ledger::init(
        ledger::LedgerProfile::permissionless({operator_key.public_key}));
    vcred::LedgerRegistry registry(lgr, auth_of(operator_key));
    obs.add("ledger", run_backend(registry));
  }
  return std::move(obs).str();
}

std::string sc_authentication_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  auto attacker = make_key(rng, "attacker-key");
  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0, kT0 + 1000, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder, {"name"},
                                         "nonce-7", issued.attributes);
  auto report = vcred::verify_presentation(pres, registry, "nonce-7", kT0 + 1);

  Observed obs;
  obs.add("holder_proof", report_value(report));
  obs.add("name", report.disclosed.count("name") ? report.disclosed.at("name")
                                                 : "");
  obs.add("attacker_derive", op_value([&] {
            vcred::derive_presentation(issued.credential, attacker, {"name"},
                                       "nonce-8", issued.attributes);
          }));
  auto stolen = pres;
  stolen.challenge = "nonce-8";
  stolen.holder_signature =
      crypto::sign(attacker.private_key, stolen.signing_bytes());
  auto stolen_report =
      vcred::verify_presentation(stolen, registry, "nonce-8", kT0 + 1);
  obs.add("attacker_signature", report_value(stolen_report));
  return std::move(obs).str();
}

std::string sc_functionality_vc(crypto::Rng& rng) {
  auto issuer = make_key(rng, "registrar-key");
  auto holder = make_key(rng, "holder-key");
  vcred::MemoryRegistry registry;
  registry.register_issuer("registrar", issuer.public_key);
  auto issued = vcred::issue_credential(issuer, "registrar",
                                        holder.public_key, kStudentAttributes,
                                        kT0, kT0 + 1000, registry, rng);
  auto pres = vcred::derive_presentation(issued.credential, holder,
                                         {"name", "program"}, "challenge-1",
                                         issued.attributes);
  auto report =
      vcred::verify_presentation(pres, registry, "challenge-1", kT0 + 1);

  Observed obs;
  obs.add("commitments", std::to_string(issued.credential.commitments.size()));
  obs.add("disclosed_count", std::to_string(report.disclosed.size()));
  obs.add("program", report.disclosed.count("program")
                         ? report.disclosed.at("program")
                         : "");
  obs.add("unknown_label", op_value([&] {
            vcred::derive_presentation(issued.credential, holder, {"degree"},
                                       "challenge-2", issued.attributes);
          }));
  return std::move(obs).str();
}

// ---------------------------------------------------------------------------
// contract scenarios

std::string sc_trust_contract(crypto::Rng& rng) {
  Observed obs;
  {
    auto owner = make_key(rng, "owner-key");
    auto mallory = make_key(rng, "mallory-key");
    auto lgr = ledger::Ledger::init(ledger::LedgerProfile::permissionless(
        {owner.public_key, mallory.public_key}));
    cert::init_contract(lgr, auth_of(owner));
    obs.add("non_owner", op_value([&] {
              cert::issue_certificate(lgr, auth_of(mallory), "alice",
                                      "CS", "2023-05-15", "3.90");
            }));
  }
  {
    auto registrar = make_key(rng, "registrar-key");
    auto p1 = make_key(rng, "p1-key");
    auto p2 = make_key(rng, "p2-key");
    auto p3 = make_key(rng, "p3-key");
    auto lgr = ledger::Ledger::init(ledger::LedgerProfile::permissioned(
        {{"registrar", registrar.public_key},
         {"p1", p1.public_key},
         {"p2", p2.public_key},
         {"p3", p3.public_key}}));
    lgr.create_channel("cert", {"registrar"}, {2, {"p1", "p2", "p3"}});

    ledger::TxAuth one{registrar, "cert", {{"p1", p1.private_key}}};
    obs.add("one_endorsement", op_value([&] {
              cert::issue_certificate(lgr, one, "alice", "CS", "2023-05-15",
                                      "3.90");
            }));
    ledger::TxAuth two{registrar,
                       "cert",
                       {{"p1", p1.private_key}, {"p2", p2.private_key}}};
    obs.add("two_endorsements", op_value([&] {
              cert::issue_certificate(lgr, two, "alice", "CS", "2023-05-15",
                                      "3.90");
            }) == "ok"
                                    ? "accepted"
                                    : "rejected");
  }
  return std::move(obs).str();
}

std::string sc_revocation_contract(crypto::Rng& rng) {
  auto owner = make_key(rng, "owner-key");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  auto auth = auth_of(owner);
  cert::init_contract(lgr, auth);
  // Bridge configuration: token signer and contract owner are one party.
  auto bridged = bridge::issue(lgr, auth, owner, "registrar.example", "alice",
                               "CS", "2023-05-15", "3.90");

  Observed obs;
  obs.add("verify_before",
          outcome_value(cert::verify_certificate(
              lgr, bridged.certificate_id, "alice", "CS", "2023-05-15",
              "3.90")));
  obs.add("bridge_before",
          bridge_value(bridge::verify(lgr, bridged.jwt, owner.public_key)));
  cert::revoke_certificate(lgr, auth, bridged.certificate_id);
  obs.add("after_revoke",
          outcome_value(cert::verify_certificate(
              lgr, bridged.certificate_id, "alice", "CS", "2023-05-15",
              "3.90")));
  obs.add("bridge_after",
          bridge_value(bridge::verify(lgr, bridged.jwt, owner.public_key)));
  return std::move(obs).str();
}

std::string sc_privacy_contract(crypto::Rng& rng) {
  Observed obs;
  {
    auto owner = make_key(rng, "owner-key");
    auto lgr = ledger::Ledger::init(
        ledger::LedgerProfile::permissionless({owner.public_key}));
    auto auth = auth_of(owner);
    cert::init_contract(lgr, auth);
    auto id = cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15",
                                      "3.90");
    auto record = cert::get_certificate(lgr, id);
    obs.add_bool("record_readable", record.name == "alice");
    // The whole attribute set sits in world state in the clear.
    auto raw = lgr.read_state(std::string(ledger::kDefaultChannel),
                              std::string(cert::kContractId), "cert/" + id);
    obs.add_bool("gpa_public",
                 raw && raw->find("3.90") != std::string::npos);
  }
  {
    auto registrar = make_key(rng, "registrar-key");
    auto p1 = make_key(rng, "p1-key");
    auto outsider = make_key(rng, "outsider-key");
    auto lgr = ledger::Ledger::init(ledger::LedgerProfile::permissioned(
        {{"registrar", registrar.public_key},
         {"p1", p1.public_key},
         {"outsider", outsider.public_key}}));
    lgr.create_channel("cert", {"registrar"}, {1, {"p1"}});
    ledger::TxAuth auth{registrar, "cert", {{"p1", p1.private_key}}};
    cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15", "3.90");
    obs.add("nonmember_read", op_value([&] {
              lgr.read_state("cert", std::string(cert::kContractId), "owner",
                             std::string("outsider"));
            }));
  }
  return std::move(obs).str();
}

std::string sc_security_contract(crypto::Rng& rng) {
  auto owner = make_key(rng, "owner-key");
  auto stranger = make_key(rng, "stranger-key");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  auto auth = auth_of(owner);
  cert::init_contract(lgr, auth);
  cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15", "3.90");

  Observed obs;
  obs.add("honest_replay", op_value([&] {
            ledger::Ledger::replay(lgr.profile(), lgr.chain());
          }));

  ledger::Transaction forged;
  forged.sender = owner.public_key;
  forged.channel = std::string(ledger::kDefaultChannel);
  forged.contract = std::string(cert::kContractId);
  forged.method = "revoke";
  forged.args = {"some-id"};
  forged.tx_id = crypto::sha256(forged.body());
  forged.sender_signature = crypto::sign(stranger.private_key, forged.body());
  auto receipt = lgr.submit(forged);
  obs.add("forged_sender",
          receipt.accepted ? "accepted" : receipt.reason);

  auto blocks = lgr.chain();
  blocks[2].txs[0].sender_signature.bytes[0] ^= 0x01;
  obs.add("bitflip_replay", op_value([&] {
            ledger::Ledger::replay(lgr.profile(), blocks);
          }));
  return std::move(obs).str();
}

std::string sc_validity_contract(crypto::Rng& rng) {
  auto owner = make_key(rng, "owner-key");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  auto auth = auth_of(owner);
  cert::init_contract(lgr, auth);
  auto id =
      cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15", "3.90");

  Observed obs;
  obs.add("verify_at_issue",
          outcome_value(cert::verify_certificate(lgr, id, "alice", "CS",
                                                 "2023-05-15", "3.90")));
  // No clock enters verification; only chain state does.
  cert::issue_certificate(lgr, auth, "bob", "EE", "2024-05-20", "3.10");
  cert::issue_certificate(lgr, auth, "carol", "ME", "2025-05-18", "3.50");
  obs.add("verify_many_blocks_later",
          outcome_value(cert::verify_certificate(lgr, id, "alice", "CS",
                                                 "2023-05-15", "3.90")));
  cert::revoke_certificate(lgr, auth, id);
  obs.add("after_revoke",
          outcome_value(cert::verify_certificate(lgr, id, "alice", "CS",
                                                 "2023-05-15", "3.90")));
  return std::move(obs).str();
}

std::string sc_verification_contract(crypto::Rng& rng) {
  auto owner = make_key(rng, "owner-key");
  auto registrar = make_key(rng, "registrar-key");
  auto other = make_key(rng, "other-key");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  auto auth = auth_of(owner);
  cert::init_contract(lgr, auth);
  // Bridge configuration: token signer differs from the contract owner.
  auto bridged = bridge::issue(lgr, auth, registrar, "registrar.example",
                               "alice", "CS", "2023-05-15", "3.90");

  Observed obs;
  obs.add("bridge",
          bridge_value(bridge::verify(lgr, bridged.jwt,
                                      registrar.public_key)));
  obs.add("wrong_key",
          bridge_value(bridge::verify(lgr, bridged.jwt, other.public_key)));

  auto jws = jose::decode(bridged.jwt);
  auto payload = jws.payload;
  payload["gpa"] = "4.00";
  auto altered =
      jose::compact_sign(jws.header, payload, registrar.private_key);
  obs.add("altered_gpa",
          bridge_value(bridge::verify(lgr, altered, registrar.public_key)));
  return std::move(obs).str();
}

std::string sc_authentication_contract(crypto::Rng& rng) {
  auto owner = make_key(rng, "owner-key");
  auto stranger = make_key(rng, "stranger-key");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  auto auth = auth_of(owner);
  cert::init_contract(lgr, auth);

  Observed obs;
  obs.add("unknown_sender", op_value([&] {
            cert::issue_certificate(lgr, auth_of(stranger), "alice",
                                    "CS", "2023-05-15", "3.90");
          }));
  obs.add("owner_issue", op_value([&] {
            cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15",
                                    "3.90");
          }) == "ok"
                              ? "accepted"
                              : "rejected");
  obs.add("owner_of_1", cert::owner_of(lgr, 1));
  return std::move(obs).str();
}

std::string sc_functionality_contract(crypto::Rng& rng) {
  auto owner = make_key(rng, "owner-key");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  auto auth = auth_of(owner);
  cert::init_contract(lgr, auth);
  auto id =
      cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15", "3.90");
  cert::issue_certificate(lgr, auth, "bob", "EE", "2024-05-20", "3.10");

  Observed obs;
  obs.add("tokens", std::to_string(cert::token_count(lgr)));
  obs.add("verify", outcome_value(cert::verify_certificate(
                        lgr, id, "alice", "CS", "2023-05-15", "3.90")));
  obs.add("get_program", cert::get_certificate(lgr, id).program);
  obs.add("bad_gpa", op_value([&] {
            cert::issue_certificate(lgr, auth, "dora", "CS", "2026-05-17",
                                    "4.10");
          }));
  obs.add("duplicate", op_value([&] {
            cert::issue_certificate(lgr, auth, "alice", "CS", "2023-05-15",
                                    "3.90");
          }));
  return std::move(obs).str();
}

using ScenarioFn = std::string (*)(crypto::Rng&);

const std::map<std::string, ScenarioFn>& scripts() {
  static const std::map<std::string, ScenarioFn> table = {
      {"trust/scitokens", sc_trust_scitokens},
      {"revocation/scitokens", sc_revocation_scitokens},
      {"privacy/scitokens", sc_privacy_scitokens},
      {"security/scitokens", sc_security_scitokens},
      {"validity/scitokens", sc_validity_scitokens},
      {"verification/scitokens", sc_verification_scitokens},
      {"authentication/scitokens", sc_authentication_scitokens},
      {"functionality/scitokens", sc_functionality_scitokens},
      {"trust/vc", sc_trust_vc},
      {"revocation/vc", sc_revocation_vc},
      {"privacy/vc", sc_privacy_vc},
      {"security/vc", sc_security_vc},
      {"validity/vc", sc_validity_vc},
      {"verification/vc", sc_verification_vc},
      {"authentication/vc", sc_authentication_vc},
      {"functionality/vc", sc_functionality_vc},
      {"trust/contract", sc_trust_contract},
      {"revocation/contract", sc_revocation_contract},
      {"privacy/contract", sc_privacy_contract},
      {"security/contract", sc_security_contract},
      {"validity/contract", sc_validity_contract},
      {"verification/contract", sc_verification_contract},
      {"authentication/contract", sc_authentication_contract},
      {"functionality/contract", sc_functionality_contract},
  };
  return table;
}

const std::vector<NonExecutableRow>& non_executable_rows() {
  static const std::vector<NonExecutableRow> rows = {
      {"scalability",
       "throughput and cost are properties of a deployment, not of this "
       "simulation"},
      {"interoperability",
       "wire-format conformance is exercised by the token and bridge "
       "suites; cross-vendor exchange needs external systems"},
      {"ease of integration", "qualitative; no measurement procedure"},
      {"credential management",
       "operational practice outside the toolkit boundary"},
  };
  return rows;
}

ScenarioResult run_with_expected(const std::string& name,
                                 const std::string& expected) {
  auto it = scripts().find(name);
  if (it == scripts().end())
    throw Error(errc::scenario_panic, "unknown scenario: " + name);

  ScenarioResult result;
  result.name = name;
  auto slash = name.find('/');
  result.criterion = name.substr(0, slash);
  result.mechanism = name.substr(slash + 1);
  result.expected = expected;
  try {
    auto rng = scenario_rng(name);
    result.observed = it->second(rng);
  } catch (const std::exception& e) {
    throw Error(errc::scenario_panic, name + ": " + e.what());
  }
  result.matches_expected = result.observed == result.expected;
  return result;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& criterion : kCriteria)
      for (const auto& mechanism : kMechanisms)
        out.push_back(criterion + "/" + mechanism);
    return out;
  }();
  return names;
}

ScenarioResult run_scenario(const std::string& name) {
  const auto& fixtures = expected_fixtures();
  auto it = fixtures.find(name);
  if (it == fixtures.end())
    throw Error(errc::scenario_panic, "no fixture for scenario: " + name);
  return run_with_expected(name, it->second);
}

ComparisonMatrix run_matrix() { return run_matrix({}); }

ComparisonMatrix run_matrix(
    const std::map<std::string, std::string>& expected_override) {
  ComparisonMatrix matrix;
  const auto& fixtures = expected_fixtures();
  for (const auto& name : scenario_names()) {
    auto ov = expected_override.find(name);
    const std::string& expected =
        ov != expected_override.end() ? ov->second : fixtures.at(name);
    matrix.cells.push_back(run_with_expected(name, expected));
  }
  matrix.non_executable = non_executable_rows();
  return matrix;
}

bool ComparisonMatrix::all_match() const {
  for (const auto& cell : cells)
    if (!cell.matches_expected) return false;
  return true;
}

std::string ComparisonMatrix::to_json() const {
  ordered_json doc;
  doc["format"] = "triauth.matrix";
  doc["version"] = 1;
  doc["t0"] = kT0;
  ordered_json cell_rows = ordered_json::array();
  for (const auto& cell : cells) {
    ordered_json row;
    row["name"] = cell.name;
    row["criterion"] = cell.criterion;
    row["mechanism"] = cell.mechanism;
    row["expected"] = cell.expected;
    row["observed"] = cell.observed;
    row["matches_expected"] = cell.matches_expected;
    cell_rows.push_back(std::move(row));
  }
  doc["cells"] = std::move(cell_rows);
  ordered_json ne_rows = ordered_json::array();
  for (const auto& row : non_executable) {
    ordered_json r;
    r["criterion"] = row.criterion;
    r["note"] = row.note;
    ne_rows.push_back(std::move(r));
  }
  doc["non_executable"] = std::move(ne_rows);
  doc["all_match"] = all_match();
  return doc.dump(2) + "\n";
}

std::string ComparisonMatrix::to_text() const {
  const std::array<std::string, 4> header = {"criterion", "mechanism", "match",
                                             "observed"};
  std::array<std::size_t, 4> width = {header[0].size(), header[1].size(),
                                      header[2].size(), header[3].size()};
  std::vector<std::array<std::string, 4>> rows;
  for (const auto& cell : cells) {
    rows.push_back({cell.criterion, cell.mechanism,
                    cell.matches_expected ? "yes" : "NO", cell.observed});
    for (std::size_t i = 0; i < 4; ++i)
      width[i] = std::max(width[i], rows.back()[i].size());
  }

  std::ostringstream out;
  auto emit = [&](const std::array<std::string, 4>& row) {
    for (std::size_t i = 0; i < 4; ++i) {
      out << row[i];
      if (i + 1 < 4)
        out << std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << '\n';
  };
  emit(header);
  for (std::size_t i = 0; i < 4; ++i) {
    out << std::string(width[i], '-');
    if (i + 1 < 4) out << "  ";
  }
  out << '\n';
  for (const auto& row : rows) emit(row);

  out << '\n' << "non-executable criteria:\n";
  for (const auto& row : non_executable)
    out << "  " << row.criterion << ": " << row.note << '\n';

  std::size_t matched = 0;
  for (const auto& cell : cells)
    if (cell.matches_expected) ++matched;
  out << '\n'
      << matched << '/' << cells.size() << " cells match\n";
  return out.str();
}

}  // namespace triauth::harness
