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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "triauth/cert_contract.hpp"
#include "triauth/crypto.hpp"
#include "triauth/error.hpp"
#include "triauth/ledger.hpp"

using namespace triauth;
using namespace triauth::ledger;
using crypto::KeyPair;
using crypto::Rng;

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

struct PermissionlessFixture {
  Rng rng = Rng::seeded_from_string("ledger-test");
  KeyPair owner = make_key(rng, "owner");
  KeyPair other = make_key(rng, "other");
  Ledger ledger = Ledger::init(
      LedgerProfile::permissionless({owner.public_key, other.public_key}));

  PermissionlessFixture() {
    cert::init_contract(ledger, auth_of(owner));
  }

  Receipt issue(const KeyPair& sender, const std::string& name) {
    return submit_as(ledger, auth_of(sender),
                     std::string(cert::kContractId), "issue",
                     {name, "CS", "2023-05-15", "3.90"});
  }
};

struct PermissionedFixture {
  Rng rng = Rng::seeded_from_string("ledger-perm-test");
  KeyPair registrar = make_key(rng, "registrar");
  KeyPair p1 = make_key(rng, "p1");
  KeyPair p2 = make_key(rng, "p2");
  KeyPair p3 = make_key(rng, "p3");
  KeyPair outsider = make_key(rng, "outsider");
  Ledger ledger = Ledger::init(LedgerProfile::permissioned(
      {Peer{"registrar", registrar.public_key}, Peer{"p1", p1.public_key},
       Peer{"p2", p2.public_key}, Peer{"p3", p3.public_key}}));

  PermissionedFixture() {
    EndorsementPolicy policy;
    policy.threshold = 2;
    policy.peers = {"p1", "p2", "p3"};
    ledger.create_channel("cert", {"registrar"}, policy);
  }

  const crypto::PrivateKey& peer_key(const std::string& id) const {
    if (id == "p1") return p1.private_key;
    if (id == "p2") return p2.private_key;
    if (id == "p3") return p3.private_key;
    return registrar.private_key;
  }

  Transaction make_issue_tx(const std::vector<std::string>& endorsers,
                            const std::string& name = "Alice") {
    auto tx = make_transaction(registrar, "cert",
                               std::string(cert::kContractId), "issue",
                               {name, "CS", "2023-05-15", "3.90"});
    for (const auto& id : endorsers)
      tx.endorsements.push_back(endorse(ledger, "cert", id, peer_key(id), tx));
    return tx;
  }
};

}  // namespace

TEST_CASE("genesis block and empty state root") {
  PermissionlessFixture f;
  const auto& genesis = f.ledger.chain().front();
  CHECK(genesis.height == 0);
  CHECK(genesis.prev_hash.bytes == std::array<std::uint8_t, 32>{});
  CHECK(genesis.txs.empty());
  CHECK(genesis.block_hash ==
        Block::compute_hash(0, genesis.prev_hash, genesis.txs));

  auto empty = Ledger::init(LedgerProfile::permissionless({f.owner.public_key}));
  CHECK(empty.state_root() ==
        crypto::sha256(std::span<const std::uint8_t>{}));
  CHECK(empty.height() == 0);
}

TEST_CASE("profile validation") {
  Rng rng = Rng::seeded_from_string("profiles");
  auto a = make_key(rng, "a");
  auto b = make_key(rng, "b");
  CHECK_THROWS_AS(
      Ledger::init(LedgerProfile::permissionless({a.public_key, a.public_key})),
      Error);
  CHECK_THROWS_AS(Ledger::init(LedgerProfile::permissioned(
                      {Peer{"x", a.public_key}, Peer{"x", b.public_key}})),
                  Error);
  CHECK_THROWS_AS(Ledger::init(LedgerProfile::permissioned({})), Error);
}

TEST_CASE("one block per accepted transaction, hash-linked") {
  PermissionlessFixture f;
  auto h0 = f.ledger.height();
  auto r1 = f.issue(f.owner, "Alice");
  auto r2 = f.issue(f.owner, "Bob");
  REQUIRE(r1.accepted);
  REQUIRE(r2.accepted);
  CHECK(r1.reason.empty());
  CHECK(r1.block_height == h0 + 1);
  CHECK(r2.block_height == h0 + 2);
  CHECK(f.ledger.chain().size() == h0 + 3);

  const auto& chain = f.ledger.chain();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& blk = chain[i];
    CHECK(blk.height == i);
    if (i > 0) CHECK(blk.prev_hash == chain[i - 1].block_hash);
    CHECK(blk.block_hash == Block::compute_hash(blk.height, blk.prev_hash,
                                                blk.txs));
    if (i > 0) CHECK(blk.txs.size() == 1);
  }
}

TEST_CASE("state root witnesses state, not history") {
  auto alice_id = cert::certificate_id("Alice", "CS", "2023-05-15", "3.90");

  // Two histories that commute into the same final state.
  PermissionlessFixture f;
  f.issue(f.owner, "Alice");
  f.issue(f.owner, "Bob");
  submit_as(f.ledger, auth_of(f.owner), std::string(cert::kContractId),
            "revoke", {alice_id});

  PermissionlessFixture g;
  g.issue(g.owner, "Alice");
  submit_as(g.ledger, auth_of(g.owner), std::string(cert::kContractId),
            "revoke", {alice_id});
  g.issue(g.owner, "Bob");

  // Same final state, different history: same root, different chains.
  CHECK(f.ledger.state_root() == g.ledger.state_root());
  CHECK(f.ledger.chain()[3].block_hash != g.ledger.chain()[3].block_hash);

  // Issuing in the opposite order is a different state (the token index
  // records order), so the root must move.
  PermissionlessFixture h;
  h.issue(h.owner, "Bob");
  h.issue(h.owner, "Alice");
  CHECK(h.ledger.state_root() != f.ledger.state_root());
}

TEST_CASE("permissionless rejections, each leaving the ledger untouched") {
  PermissionlessFixture f;
  auto root = f.ledger.state_root();
  auto height = f.ledger.height();
  auto check_untouched = [&] {
    CHECK(f.ledger.state_root() == root);
    CHECK(f.ledger.height() == height);
  };

  SUBCASE("unknown contract") {
    auto r = submit_as(f.ledger, auth_of(f.owner), "no-such-contract", "m", {});
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "unknown contract");
    check_untouched();
  }
  SUBCASE("tx_id mismatch") {
    auto tx = make_transaction(f.owner, std::string(kDefaultChannel),
                               std::string(cert::kContractId), "issue",
                               {"A", "CS", "2023-05-15", "3.90"});
    tx.tx_id.bytes[0] ^= 0x01;
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "tx_id mismatch");
    check_untouched();
  }
  SUBCASE("bad sender signature") {
    auto tx = make_transaction(f.owner, std::string(kDefaultChannel),
                               std::string(cert::kContractId), "issue",
                               {"A", "CS", "2023-05-15", "3.90"});
    tx.sender_signature.bytes[5] ^= 0x20;
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "bad sender signature");
    check_untouched();
  }
  SUBCASE("forged sender") {
    // Signed by a stranger but naming an enrolled sender key.
    auto stranger = make_key(f.rng, "stranger");
    auto tx = make_transaction(stranger, std::string(kDefaultChannel),
                               std::string(cert::kContractId), "issue",
                               {"A", "CS", "2023-05-15", "3.90"});
    tx.sender = f.owner.public_key;
    tx.tx_id = crypto::sha256(tx.body());
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "bad sender signature");
    check_untouched();
  }
  SUBCASE("unknown account") {
    auto stranger = make_key(f.rng, "stranger");
    auto r = submit_as(f.ledger, auth_of(stranger),
                       std::string(cert::kContractId), "issue",
                       {"A", "CS", "2023-05-15", "3.90"});
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "unknown account");
    check_untouched();
  }
  SUBCASE("unknown channel") {
    auto auth = auth_of(f.owner);
    auth.channel = "side";
    auto r = submit_as(f.ledger, auth, std::string(cert::kContractId),
                       "issue", {"A", "CS", "2023-05-15", "3.90"});
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "unknown channel");
    check_untouched();
  }
  SUBCASE("endorsements are not a permissionless concept") {
    auto tx = make_transaction(f.owner, std::string(kDefaultChannel),
                               std::string(cert::kContractId), "issue",
                               {"A", "CS", "2023-05-15", "3.90"});
    tx.endorsements.push_back(
        Endorsement{"p1", crypto::sign(f.owner.private_key, tx.body())});
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "bad transaction");
    check_untouched();
  }
  SUBCASE("contract rejection carries the contract's code") {
    auto r = submit_as(f.ledger, auth_of(f.owner),
                       std::string(cert::kContractId), "issue",
                       {"A", "CS", "2023-05-15", "9.99"});
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "bad gpa");
    check_untouched();
  }
  SUBCASE("writes to the system channel are rejected") {
    auto auth = auth_of(f.owner);
    auth.channel = std::string(kSystemChannel);
    auto r = submit_as(f.ledger, auth, std::string(kSystemContract),
                       "create_channel", {"x"});
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "bad transaction");
    check_untouched();
  }
}

TEST_CASE("create_channel is permissioned-only and validated") {
  PermissionlessFixture f;
  EndorsementPolicy policy;
  policy.threshold = 1;
  policy.peers = {"p1"};
  try {
    f.ledger.create_channel("x", {"p1"}, policy);
    FAIL("channel created on permissionless profile");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_permissioned);
  }

  PermissionedFixture p;
  EndorsementPolicy p2 = {1, {"p1"}};
  try {
    p.ledger.create_channel("cert", {"registrar"}, p2);
    FAIL("duplicate channel accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::duplicate_channel);
  }
  try {
    p.ledger.create_channel("x", {"ghost"}, p2);
    FAIL("unknown member accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_peer);
  }
  try {
    p.ledger.create_channel("x", {"registrar"},
                            EndorsementPolicy{1, {"ghost"}});
    FAIL("unknown policy peer accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_peer);
  }
  try {
    p.ledger.create_channel("x", {"registrar"}, EndorsementPolicy{0, {"p1"}});
    FAIL("zero threshold accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_policy);
  }
  try {
    p.ledger.create_channel("x", {"registrar"},
                            EndorsementPolicy{3, {"p1", "p2"}});
    FAIL("unreachable threshold accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_policy);
  }

  // Channel creation is itself on-chain history and survives replay.
  auto before = p.ledger.height();
  p.ledger.create_channel("audit", {"registrar"}, EndorsementPolicy{1, {"p1"}});
  CHECK(p.ledger.height() == before + 1);
  auto replayed = Ledger::replay(p.ledger.profile(), p.ledger.chain());
  REQUIRE(replayed.channel_config("audit").has_value());
  CHECK(replayed.channel_config("audit")->policy.threshold == 1);
  CHECK(replayed.state_root() == p.ledger.state_root());
}

TEST_CASE("endorsement policy enforcement") {
  PermissionedFixture f;

  SUBCASE("accepted with exactly threshold endorsements") {
    auto r = f.ledger.submit(f.make_issue_tx({"p1", "p2"}));
    CHECK(r.accepted);
  }
  SUBCASE("accepted with more than threshold") {
    auto r = f.ledger.submit(f.make_issue_tx({"p1", "p2", "p3"}));
    CHECK(r.accepted);
  }
  SUBCASE("rejected below threshold") {
    auto r = f.ledger.submit(f.make_issue_tx({"p1"}));
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "insufficient endorsements");
  }
  SUBCASE("duplicate endorsements count once") {
    auto tx = f.make_issue_tx({"p1", "p1"});
    CHECK(tx.endorsements.size() == 2);
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "insufficient endorsements");
  }
  SUBCASE("endorsement by a peer outside the policy") {
    auto tx = f.make_issue_tx({"p1"});
    auto body = tx.body();
    tx.endorsements.push_back(
        Endorsement{"registrar", crypto::sign(f.registrar.private_key, body)});
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "endorser not in policy");
  }
  SUBCASE("endorsement naming an unknown peer") {
    auto tx = f.make_issue_tx({"p1"});
    tx.endorsements.push_back(
        Endorsement{"ghost", crypto::sign(f.p2.private_key, tx.body())});
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "unknown endorsing peer");
  }
  SUBCASE("tampered endorsement signature") {
    auto tx = f.make_issue_tx({"p1", "p2"});
    tx.endorsements[1].signature.bytes[0] ^= 0x01;
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "invalid endorsement signature");
  }
  SUBCASE("endorsement signed by the wrong key") {
    auto tx = f.make_issue_tx({"p1"});
    tx.endorsements.push_back(
        Endorsement{"p2", crypto::sign(f.p3.private_key, tx.body())});
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "invalid endorsement signature");
  }
  SUBCASE("sender outside the channel membership") {
    auto tx = make_transaction(f.p1, "cert", std::string(cert::kContractId),
                               "issue", {"A", "CS", "2023-05-15", "3.90"});
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "sender not a channel member");
  }
  SUBCASE("sender not enrolled at all") {
    auto tx = make_transaction(f.outsider, "cert",
                               std::string(cert::kContractId), "issue",
                               {"A", "CS", "2023-05-15", "3.90"});
    auto r = f.ledger.submit(tx);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason == "unknown account");
  }
}

TEST_CASE("endorse helper validates its inputs") {
  PermissionedFixture f;
  auto tx = make_transaction(f.registrar, "cert",
                             std::string(cert::kContractId), "issue",
                             {"A", "CS", "2023-05-15", "3.90"});
  auto code = [&](auto&& fn) {
    try {
      fn();
      return errc::usage;
    } catch (const Error& e) {
      return e.code();
    }
  };
  CHECK(code([&] {
          endorse(f.ledger, "ghost-channel", "p1", f.p1.private_key, tx);
        }) == errc::unknown_channel);
  CHECK(code([&] {
          endorse(f.ledger, "cert", "ghost", f.p1.private_key, tx);
        }) == errc::unknown_peer);
  CHECK(code([&] {
          endorse(f.ledger, "cert", "registrar", f.registrar.private_key, tx);
        }) == errc::not_in_policy);
}

TEST_CASE("channel isolation and read access control") {
  PermissionedFixture f;
  f.ledger.create_channel("other", {"registrar"},
                          EndorsementPolicy{1, {"p1"}});
  REQUIRE(f.ledger.submit(f.make_issue_tx({"p1", "p2"})).accepted);
  auto id = cert::certificate_id("Alice", "CS", "2023-05-15", "3.90");

  CHECK(f.ledger
            .read_state("cert", std::string(cert::kContractId), "cert/" + id,
                        std::string("registrar"))
            .has_value());
  // Same key through the other channel: nothing there.
  CHECK_FALSE(f.ledger
                  .read_state("other", std::string(cert::kContractId),
                              "cert/" + id, std::string("registrar"))
                  .has_value());
  // Non-members may not read at all.
  try {
    f.ledger.read_state("cert", std::string(cert::kContractId), "cert/" + id,
                        std::string("p1"));
    FAIL("non-member read accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::access_denied);
  }

  // Permissionless ledgers ignore the reader argument.
  PermissionlessFixture pl;
  pl.issue(pl.owner, "Alice");
  CHECK(pl.ledger
            .read_state(std::string(kDefaultChannel),
                        std::string(cert::kContractId), "cert/" + id)
            .has_value());
}

TEST_CASE("queries are read-only") {
  PermissionlessFixture f;
  f.issue(f.owner, "Alice");
  auto id = cert::certificate_id("Alice", "CS", "2023-05-15", "3.90");

  auto result = f.ledger.query(std::string(kDefaultChannel),
                               std::string(cert::kContractId), "verify",
                               {id, "Alice", "CS", "2023-05-15", "3.90"});
  CHECK(result.value == "true");

  // The query context has no sender identity, so the auth guard rejects a
  // mutating method before it can touch state.
  auto root = f.ledger.state_root();
  try {
    f.ledger.query(std::string(kDefaultChannel),
                   std::string(cert::kContractId), "issue",
                   {"B", "CS", "2023-05-15", "3.90"});
    FAIL("query executed a write");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_owner);
  }
  CHECK(f.ledger.state_root() == root);

  // A method that writes before any guard (init on a fresh ledger) dies on
  // the read-only context itself.
  auto fresh =
      Ledger::init(LedgerProfile::permissionless({f.owner.public_key}));
  auto fresh_root = fresh.state_root();
  try {
    fresh.query(std::string(kDefaultChannel), std::string(cert::kContractId),
                "init", {});
    FAIL("query executed a write");
  } catch (const Error& e) {
    CHECK(e.code() == errc::read_only_context);
  }
  CHECK(fresh.state_root() == fresh_root);
}

TEST_CASE("replay reproduces state and flags every tamper") {
  PermissionedFixture f;
  REQUIRE(f.ledger.submit(f.make_issue_tx({"p1", "p2"})).accepted);
  REQUIRE(f.ledger.submit(f.make_issue_tx({"p2", "p3"}, "Bob")).accepted);
  const auto& profile = f.ledger.profile();
  auto chain = f.ledger.chain();

  auto replayed = Ledger::replay(profile, chain);
  CHECK(replayed.state_root() == f.ledger.state_root());
  CHECK(replayed.height() == f.ledger.height());

  auto expect_broken = [&](std::vector<Block> bad) {
    try {
      Ledger::replay(profile, bad);
      FAIL("tampered chain replayed");
    } catch (const Error& e) {
      CHECK(e.code() == errc::broken_chain);
    }
  };

  {
    auto bad = chain;
    bad[2].block_hash.bytes[4] ^= 0x01;
    expect_broken(bad);
  }
  {
    auto bad = chain;
    bad[2].prev_hash.bytes[0] ^= 0x01;
    expect_broken(bad);
  }
  {
    auto bad = chain;
    bad[2].txs[0].args[0] = "Mallory";
    expect_broken(bad);
  }
  {
    auto bad = chain;
    bad[2].txs[0].sender_signature.bytes[10] ^= 0x40;
    expect_broken(bad);
  }
  {
    auto bad = chain;
    bad[2].txs[0].endorsements.pop_back();
    expect_broken(bad);
  }
  {
    auto bad = chain;
    bad.erase(bad.begin() + 2);
    expect_broken(bad);
  }
  {
    auto bad = chain;
    std::swap(bad[2], bad[3]);
    expect_broken(bad);
  }
  {
    expect_broken({});
  }
  {
    // A fabricated extra block fails even with a consistent local hash.
    auto bad = chain;
    Block extra;
    extra.height = bad.back().height + 1;
    extra.prev_hash = bad.back().block_hash;
    extra.txs = bad[2].txs;
    extra.block_hash = Block::compute_hash(extra.height, extra.prev_hash,
                                           extra.txs);
    bad.push_back(extra);
    expect_broken(bad);
  }
}

TEST_CASE("journal roundtrip, crash tail, and poisoned line") {
  PermissionlessFixture f;
  f.issue(f.owner, "Alice");
  auto path = std::filesystem::temp_directory_path() /
              ("triauth-journal-" + Rng::system().token());

  Journal::write(path, f.ledger);
  auto [profile, blocks] = Journal::read(path);
  CHECK(blocks.size() == f.ledger.chain().size());
  auto replayed = Ledger::replay(profile, blocks);
  CHECK(replayed.state_root() == f.ledger.state_root());

  // Append one more block through the incremental path.
  f.issue(f.owner, "Bob");
  Journal::append_block(path, f.ledger.chain().back());
  auto [profile2, blocks2] = Journal::read(path);
  CHECK(blocks2.size() == f.ledger.chain().size());
  CHECK(Ledger::replay(profile2, blocks2).state_root() ==
        f.ledger.state_root());

  // A crash mid-append leaves an unterminated fragment: dropped on read.
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << "{\"height\":9,\"prev\":\"trunc";
  }
  auto [profile3, blocks3] = Journal::read(path);
  CHECK(blocks3.size() == blocks2.size());
  CHECK_NOTHROW(Ledger::replay(profile3, blocks3));

  // The same bytes newline-terminated are a completed, corrupt record.
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << Journal::profile_json(f.ledger.profile()) << "\n";
    out << Journal::block_json(f.ledger.chain()[0]) << "\n";
    out << "{\"height\":9,\"prev\":\"trunc\n";
  }
  CHECK_THROWS_AS(Journal::read(path), Error);

  CHECK_THROWS_AS(Journal::read(path.string() + ".missing"), Error);
  std::filesystem::remove(path);
}
