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

#include <string>
#include <vector>

#include "triauth/cert_contract.hpp"
#include "triauth/crypto.hpp"
#include "triauth/ledger.hpp"

namespace triauth::bridge {

struct BridgedCertificate {
  std::string certificate_id;
  std::string jwt;
};

struct BridgeReport {
  bool valid = false;
  // Every failed check, in check order: "jwt malformed",
  // "jwt signature invalid", "payload mismatch", and the on-chain
  // verification code ("unknown", "mismatch", "revoked"). A malformed
  // token short-circuits to that single reason.
  std::vector<std::string> reasons;
};

// Issues the certificate on the ledger under `auth` (with an issuer proof
// bound to the sender key), then wraps the anchored record in a compact JWS
// signed with `token_key`. Throws whatever the ledger or contract rejects
// with; the token is only ever produced for an accepted transaction.
BridgedCertificate issue(ledger::Ledger& ledger, const ledger::TxAuth& auth,
                         const crypto::KeyPair& token_key,
                         const std::string& issuer_id, const std::string& name,
                         const std::string& program,
                         const std::string& graduation_date,
                         const std::string& gpa);

// Both routes must agree: the JWS signature must verify against `token_key`
// and the payload must match the ledger record bit for bit, including the
// profile the ledger runs under, and the record must still verify on chain.
BridgeReport verify(const ledger::Ledger& ledger, const std::string& jwt,
                    const crypto::PublicKey& token_key);

}  // namespace triauth::bridge
