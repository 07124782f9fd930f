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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triauth/crypto.hpp"
#include "triauth/ledger.hpp"

namespace triauth::cert {

// Methods: issue(N,P,GD,G[,proof]), verify(id,N,P,GD,G), revoke(id),
// get(id), owner_of(token), init().
inline constexpr std::string_view kContractId = "student-certificate";

// The stored signature is the unkeyed hash of the canonical encoding of the
// four labeled fields; issuance authenticity comes from ledger authorization
// (owner gate or endorsement policy), not from this value.
crypto::Digest certificate_digest(const std::string& name,
                                  const std::string& program,
                                  const std::string& graduation_date,
                                  const std::string& gpa);

// Deterministic id: base64url of the digest. Issuing identical attributes
// twice is therefore a duplicate.
std::string certificate_id(const std::string& name, const std::string& program,
                           const std::string& graduation_date,
                           const std::string& gpa);

struct Certificate {
  std::string name;
  std::string program;
  std::string graduation_date;
  std::string gpa;  // fixed two-decimal string in [0.00, 4.00]
  crypto::Digest signature;
  // Extended mode only: sender's Ed25519 signature over the digest bytes.
  std::optional<std::string> issuer_proof;
};

struct VerifyOutcome {
  bool valid = false;
  std::string reason;  // "", "unknown", "mismatch" or "revoked"
};

// Bootstraps the contract owner on a channel: the transaction sender becomes
// owner. Required before issuance on the permissionless profile.
void init_contract(ledger::Ledger& ledger, const ledger::TxAuth& auth);

// Extended-mode helper: the optional fifth issue argument.
std::string make_issuer_proof(const crypto::KeyPair& issuer,
                              const std::string& name,
                              const std::string& program,
                              const std::string& graduation_date,
                              const std::string& gpa);

// Submits an issue transaction and returns the certificate id. Throws the
// contract's rejection (not_owner, bad_gpa, duplicate_certificate, ...) or
// insufficient_endorsements and friends from the ledger.
std::string issue_certificate(ledger::Ledger& ledger,
                              const ledger::TxAuth& auth,
                              const std::string& name,
                              const std::string& program,
                              const std::string& graduation_date,
                              const std::string& gpa,
                              const std::optional<std::string>& issuer_proof =
                                  std::nullopt);

// Read-only: recompute-and-compare plus the revocation check. Never throws
// for negative outcomes.
VerifyOutcome verify_certificate(
    const ledger::Ledger& ledger, const std::string& id,
    const std::string& name, const std::string& program,
    const std::string& graduation_date, const std::string& gpa,
    const std::string& channel = std::string(ledger::kDefaultChannel));

void revoke_certificate(ledger::Ledger& ledger, const ledger::TxAuth& auth,
                        const std::string& id);

Certificate get_certificate(
    const ledger::Ledger& ledger, const std::string& id,
    const std::string& channel = std::string(ledger::kDefaultChannel));

// ERC721-style lookup; token ids are dense from 1.
std::string owner_of(
    const ledger::Ledger& ledger, std::uint64_t token_id,
    const std::string& channel = std::string(ledger::kDefaultChannel));

std::uint64_t token_count(
    const ledger::Ledger& ledger,
    const std::string& channel = std::string(ledger::kDefaultChannel));

// Ledger-facing entry point.
std::string contract_main(ledger::ContractContext& ctx,
                          const std::string& method,
                          const std::vector<std::string>& args);

}  // namespace triauth::cert
