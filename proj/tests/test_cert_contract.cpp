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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "support/sha256_ref.hpp"
#include "triauth/cert_contract.hpp"
#include "triauth/crypto.hpp"
#include "triauth/encoding.hpp"
#include "triauth/error.hpp"
#include "triauth/ledger.hpp"

using namespace triauth;
using namespace triauth::cert;
using crypto::KeyPair;
using crypto::Rng;
using ledger::Ledger;
using ledger::LedgerProfile;
using ledger::TxAuth;

namespace {

KeyPair make_key(Rng& rng, const std::string& id) {
  auto seed = rng.bytes32();
  return crypto::keygen(std::span<const std::uint8_t>(seed), id);
}

TxAuth auth_of(const KeyPair& sender) {
  TxAuth auth;
  auth.sender = sender;
  return auth;
}

struct Fixture {
  Rng rng = Rng::seeded_from_string("cert-test");
  KeyPair registrar = make_key(rng, "registrar");
  KeyPair mallory = make_key(rng, "mallory");
  Ledger ledger = Ledger::init(LedgerProfile::permissionless(
      {registrar.public_key, mallory.public_key}));

  Fixture() { init_contract(ledger, auth_of(registrar)); }
};

errc code_of(auto&& fn) {
  try {
    fn();
    return errc::usage;  // sentinel: no error
  } catch (const Error& e) {
    return e.code();
  }
}

}  // namespace

TEST_CASE("certificate digest and id match the canonical encoding") {
  auto digest = certificate_digest("Alice", "CS", "2023-05-15", "3.90");
  CHECK(digest.to_hex() ==
        "5d302f3fb611c63478cb1b85766e69632d0e035f2623872ba0107b33daeb349a");

  auto bytes = crypto::canonical_encode({{"N", "Alice"},
                                         {"P", "CS"},
                                         {"GD", "2023-05-15"},
                                         {"G", "3.90"}});
  CHECK(digest.bytes == testref::sha256_ref(bytes));
  CHECK(certificate_id("Alice", "CS", "2023-05-15", "3.90") ==
        digest.to_b64url());
}

TEST_CASE("issue then verify, field by field") {
  Fixture f;
  auto id = issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                              "2023-05-15", "3.90");
  CHECK(id == certificate_id("Alice", "CS", "2023-05-15", "3.90"));

  auto ok = verify_certificate(f.ledger, id, "Alice", "CS", "2023-05-15",
                               "3.90");
  CHECK(ok.valid);
  CHECK(ok.reason.empty());

  for (auto [n, p, d, g] :
       {std::array<const char*, 4>{"Mallory", "CS", "2023-05-15", "3.90"},
        std::array<const char*, 4>{"Alice", "EE", "2023-05-15", "3.90"},
        std::array<const char*, 4>{"Alice", "CS", "2023-05-16", "3.90"},
        std::array<const char*, 4>{"Alice", "CS", "2023-05-15", "3.91"}}) {
    auto bad = verify_certificate(f.ledger, id, n, p, d, g);
    CHECK_FALSE(bad.valid);
    CHECK(bad.reason == "mismatch");
  }

  auto unknown = verify_certificate(f.ledger, "bogus-id", "Alice", "CS",
                                    "2023-05-15", "3.90");
  CHECK_FALSE(unknown.valid);
  CHECK(unknown.reason == "unknown");

  auto cert = get_certificate(f.ledger, id);
  CHECK(cert.name == "Alice");
  CHECK(cert.gpa == "3.90");
  CHECK(cert.signature ==
        certificate_digest("Alice", "CS", "2023-05-15", "3.90"));
  CHECK_FALSE(cert.issuer_proof.has_value());
}

TEST_CASE("gpa format is strict") {
  Fixture f;
  auto issue = [&](const char* gpa) {
    return code_of([&] {
      issue_certificate(f.ledger, auth_of(f.registrar), "A", "CS",
                        "2023-05-15", gpa);
    });
  };
  CHECK(issue("0.00") == errc::usage);
  CHECK(issue("4.00") == errc::usage);
  CHECK(issue("2.50") == errc::usage);
  CHECK(issue("4.01") == errc::bad_gpa);
  CHECK(issue("5.00") == errc::bad_gpa);
  CHECK(issue("-1.00") == errc::bad_gpa);
  CHECK(issue("3.9") == errc::bad_gpa);
  CHECK(issue("3.900") == errc::bad_gpa);
  CHECK(issue("3,90") == errc::bad_gpa);
  CHECK(issue("abc") == errc::bad_gpa);
  CHECK(issue("") == errc::empty_field);
}

TEST_CASE("empty fields and duplicates are rejected") {
  Fixture f;
  issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                    "2023-05-15", "3.90");
  CHECK(code_of([&] {
          issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                            "2023-05-15", "3.90");
        }) == errc::duplicate_certificate);
  CHECK(code_of([&] {
          issue_certificate(f.ledger, auth_of(f.registrar), "", "CS",
                            "2023-05-15", "3.90");
        }) == errc::empty_field);
}

TEST_CASE("owner gate on the permissionless profile") {
  Fixture f;
  CHECK(code_of([&] {
          issue_certificate(f.ledger, auth_of(f.mallory), "Eve", "CS",
                            "2023-05-15", "3.90");
        }) == errc::not_owner);
  CHECK(code_of([&] { init_contract(f.ledger, auth_of(f.mallory)); }) ==
        errc::already_initialized);

  // A fresh ledger without init refuses issuance outright.
  auto bare = Ledger::init(
      LedgerProfile::permissionless({f.registrar.public_key}));
  CHECK(code_of([&] {
          issue_certificate(bare, auth_of(f.registrar), "A", "CS",
                            "2023-05-15", "3.90");
        }) == errc::not_initialized);
}

TEST_CASE("revocation flips verification permanently") {
  Fixture f;
  auto id = issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                              "2023-05-15", "3.90");
  CHECK(verify_certificate(f.ledger, id, "Alice", "CS", "2023-05-15", "3.90")
            .valid);

  CHECK(code_of([&] {
          revoke_certificate(f.ledger, auth_of(f.mallory), id);
        }) == errc::not_owner);
  CHECK(code_of([&] {
          revoke_certificate(f.ledger, auth_of(f.registrar), "missing");
        }) == errc::unknown_certificate);

  revoke_certificate(f.ledger, auth_of(f.registrar), id);
  auto after = verify_certificate(f.ledger, id, "Alice", "CS", "2023-05-15",
                                  "3.90");
  CHECK_FALSE(after.valid);
  CHECK(after.reason == "revoked");
  // Mismatch is reported ahead of revocation: the attribute check runs first.
  auto both = verify_certificate(f.ledger, id, "Alice", "CS", "2023-05-15",
                                 "4.00");
  CHECK(both.reason == "mismatch");
}

TEST_CASE("token registry counts and resolves owners") {
  Fixture f;
  CHECK(token_count(f.ledger) == 0);
  issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                    "2023-05-15", "3.90");
  issue_certificate(f.ledger, auth_of(f.registrar), "Bob", "EE", "2024-05-20",
                    "3.50");
  CHECK(token_count(f.ledger) == 2);
  CHECK(owner_of(f.ledger, 1) == "Alice");
  CHECK(owner_of(f.ledger, 2) == "Bob");
  CHECK(code_of([&] { owner_of(f.ledger, 3); }) == errc::unknown_token);
  CHECK(code_of([&] { owner_of(f.ledger, 0); }) == errc::unknown_token);
}

TEST_CASE("issuer proof is carried and checked") {
  Fixture f;
  auto proof = make_issuer_proof(f.registrar, "Alice", "CS", "2023-05-15",
                                 "3.90");
  auto id = issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                              "2023-05-15", "3.90", proof);
  auto cert = get_certificate(f.ledger, id);
  REQUIRE(cert.issuer_proof.has_value());
  CHECK(*cert.issuer_proof == proof);
  // Anyone can check the proof against the issuer's public key offline.
  auto sig = crypto::Signature::from_b64url(*cert.issuer_proof);
  CHECK(crypto::verify(f.registrar.public_key, cert.signature.bytes, sig));

  // A proof that does not verify under the sender key is rejected.
  auto wrong = make_issuer_proof(f.mallory, "Bob", "CS", "2023-05-15", "3.90");
  CHECK(code_of([&] {
          issue_certificate(f.ledger, auth_of(f.registrar), "Bob", "CS",
                            "2023-05-15", "3.90", wrong);
        }) == errc::bad_signature);
  CHECK(code_of([&] {
          issue_certificate(f.ledger, auth_of(f.registrar), "Bob", "CS",
                            "2023-05-15", "3.90", std::string("not-a-sig"));
        }) == errc::bad_signature);
}

TEST_CASE("permissioned issuance skips the owner gate, keeps endorsements") {
  Rng rng = Rng::seeded_from_string("cert-perm");
  auto registrar = make_key(rng, "registrar");
  auto p1 = make_key(rng, "p1");
  auto p2 = make_key(rng, "p2");
  auto ledger = Ledger::init(LedgerProfile::permissioned(
      {ledger::Peer{"registrar", registrar.public_key},
       ledger::Peer{"p1", p1.public_key}, ledger::Peer{"p2", p2.public_key}}));
  ledger::EndorsementPolicy policy;
  policy.threshold = 2;
  policy.peers = {"p1", "p2"};
  ledger.create_channel("cert", {"registrar"}, policy);

  TxAuth auth;
  auth.sender = registrar;
  auth.channel = "cert";
  auth.endorsers = {{"p1", p1.private_key}, {"p2", p2.private_key}};

  // No init_contract on this channel; the endorsement policy is the gate.
  auto id = issue_certificate(ledger, auth, "Alice", "CS", "2023-05-15",
                              "3.90");
  CHECK(verify_certificate(ledger, id, "Alice", "CS", "2023-05-15", "3.90",
                           "cert")
            .valid);

  auto starved = auth;
  starved.endorsers = {{"p1", p1.private_key}};
  CHECK(code_of([&] {
          issue_certificate(ledger, starved, "Bob", "CS", "2023-05-15",
                            "3.90");
        }) == errc::insufficient_endorsements);
}

TEST_CASE("contract state survives replay bit for bit") {
  Fixture f;
  auto id = issue_certificate(f.ledger, auth_of(f.registrar), "Alice", "CS",
                              "2023-05-15", "3.90");
  revoke_certificate(f.ledger, auth_of(f.registrar), id);

  auto replayed = Ledger::replay(f.ledger.profile(), f.ledger.chain());
  CHECK(replayed.state_root() == f.ledger.state_root());
  auto outcome = verify_certificate(replayed, id, "Alice", "CS", "2023-05-15",
                                    "3.90");
  CHECK(outcome.reason == "revoked");
  CHECK(token_count(replayed) == 1);
}
