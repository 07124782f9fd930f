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

// Microbenchmarks for the hot paths: hashing, signing, token issue/verify,
// presentation derive/verify, and ledger submit/root/replay. All inputs are
// seeded so numbers are comparable across runs.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "triauth/cert_contract.hpp"
#include "triauth/crypto.hpp"
#include "triauth/ledger.hpp"
#include "triauth/scitokens.hpp"
#include "triauth/vcred.hpp"

namespace crypto = triauth::crypto;
namespace ledger = triauth::ledger;
namespace cert = triauth::cert;
namespace scitokens = triauth::scitokens;
namespace vcred = triauth::vcred;

namespace {

constexpr std::int64_t kT0 = 1700000000;

crypto::KeyPair bench_key(const std::string& id) {
  auto rng = crypto::Rng::seeded_from_string("bench-" + id);
  auto seed = rng.bytes32();
  return crypto::keygen(std::span<const std::uint8_t>(seed), id);
}

void BM_Sha256(benchmark::State& state) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(state.range(0)),
                                 0xa5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        crypto::sha256(std::span<const std::uint8_t>(data)));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(64)->Arg(1024)->Arg(65536);

void BM_CanonicalEncode(benchmark::State& state) {
  crypto::CanonicalRecord record{{"N", "Alice Example"},
                                 {"P", "Computer Science"},
                                 {"GD", "2023-05-15"},
                                 {"G", "3.90"}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::canonical_encode(record));
  }
}
BENCHMARK(BM_CanonicalEncode);

void BM_Ed25519Sign(benchmark::State& state) {
  auto keys = bench_key("sign");
  std::vector<std::uint8_t> message(256, 0x42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::sign(
        keys.private_key, std::span<const std::uint8_t>(message)));
  }
}
BENCHMARK(BM_Ed25519Sign);

void BM_Ed25519Verify(benchmark::State& state) {
  auto keys = bench_key("verify");
  std::vector<std::uint8_t> message(256, 0x42);
  auto sig =
      crypto::sign(keys.private_key, std::span<const std::uint8_t>(message));
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::verify(
        keys.public_key, std::span<const std::uint8_t>(message), sig));
  }
}
BENCHMARK(BM_Ed25519Verify);

void BM_TokenIssue(benchmark::State& state) {
  scitokens::TokenIssuer issuer("https://bench.test", bench_key("issuer"),
                                crypto::Rng::seeded_from_string("bench-rng"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        issuer.issue_access_token("alice", {"read:/data"}, {}, kT0));
  }
}
BENCHMARK(BM_TokenIssue);

void BM_TokenVerify(benchmark::State& state) {
  scitokens::TokenIssuer issuer("https://bench.test", bench_key("issuer"),
                                crypto::Rng::seeded_from_string("bench-rng"));
  auto token = issuer.issue_access_token("alice", {"read:/data"}, {}, kT0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        scitokens::verify_access_token(token, issuer.public_key(), kT0 + 1));
  }
}
BENCHMARK(BM_TokenVerify);

struct CredentialSetup {
  vcred::MemoryRegistry registry;
  crypto::KeyPair issuer_key = bench_key("uni");
  crypto::KeyPair holder_key = bench_key("holder");
  vcred::Issuance issuance;

  CredentialSetup() {
    registry.register_issuer("uni", issuer_key.public_key);
    auto rng = crypto::Rng::seeded_from_string("bench-cred");
    issuance = vcred::issue_credential(
        issuer_key, "uni", holder_key.public_key,
        {{"name", "Alice"}, {"program", "CS"}, {"gpa", "3.90"}}, kT0,
        kT0 + 100000, registry, rng);
  }
};

void BM_PresentationDerive(benchmark::State& state) {
  CredentialSetup setup;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vcred::derive_presentation(
        setup.issuance.credential, setup.holder_key, {"name"}, "challenge",
        setup.issuance.attributes));
  }
}
BENCHMARK(BM_PresentationDerive);

void BM_PresentationVerify(benchmark::State& state) {
  CredentialSetup setup;
  auto pres = vcred::derive_presentation(setup.issuance.credential,
                                         setup.holder_key, {"name"},
                                         "challenge",
                                         setup.issuance.attributes);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        vcred::verify_presentation(pres, setup.registry, "challenge",
                                   kT0 + 1));
  }
}
BENCHMARK(BM_PresentationVerify);

void BM_LedgerSubmit(benchmark::State& state) {
  auto owner = bench_key("owner");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  ledger::TxAuth auth{owner};
  cert::init_contract(lgr, auth);
  std::uint64_t n = 0;
  for (auto _ : state) {
    auto receipt = ledger::submit_as(
        lgr, auth, std::string(cert::kContractId), "issue",
        {"Student" + std::to_string(n++), "CS", "2023-05-15", "3.90"});
    benchmark::DoNotOptimize(receipt);
  }
}
BENCHMARK(BM_LedgerSubmit);

void BM_StateRoot(benchmark::State& state) {
  auto owner = bench_key("owner");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  ledger::TxAuth auth{owner};
  cert::init_contract(lgr, auth);
  for (int i = 0; i < state.range(0); ++i) {
    cert::issue_certificate(lgr, auth, "Student" + std::to_string(i), "CS",
                            "2023-05-15", "3.90");
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(lgr.state_root());
  }
}
BENCHMARK(BM_StateRoot)->Arg(10)->Arg(100);

void BM_LedgerReplay(benchmark::State& state) {
  auto owner = bench_key("owner");
  auto lgr = ledger::Ledger::init(
      ledger::LedgerProfile::permissionless({owner.public_key}));
  ledger::TxAuth auth{owner};
  cert::init_contract(lgr, auth);
  for (int i = 0; i < state.range(0); ++i) {
    cert::issue_certificate(lgr, auth, "Student" + std::to_string(i), "CS",
                            "2023-05-15", "3.90");
  }
  const auto& profile = lgr.profile();
  const auto& chain = lgr.chain();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ledger::Ledger::replay(profile, chain));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LedgerReplay)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
