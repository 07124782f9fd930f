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

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "triauth/harness.hpp"

namespace triauth::harness {

namespace {

// Declarative expected-behavior table, one entry per executable cell. Kept
// as data so a review reads behavior, not code. Values are the semicolon-
// joined check=value pairs the scenario scripts emit.
constexpr const char* kExpectedTable = R"fixture(
{
  "trust/scitokens": "verify_under_issuer=ok;verify_under_other_key=bad signature;tampered=bad signature",
  "revocation/scitokens": "refresh=ok;after_revoke=revoked token;access_before_exp=ok;access_after_exp=expired",
  "privacy/scitokens": "payload_readable_without_key=true;sub=alice;scope=read:/data/alice",
  "security/scitokens": "bearer_replay=ok;tampered=bad signature;alg_none=malformed token",
  "validity/scitokens": "before_nbf=not yet valid;within_window=ok;at_exp=expired",
  "verification/scitokens": "offline_with_public_key=ok;wrong_audience=audience mismatch;matching_audience=ok",
  "authentication/scitokens": "sub=alice;iss=issuer.example;read_allowed=true;write_denied=true",
  "functionality/scitokens": "write_target=true;read_implied=true;sibling_prefix=false;unrelated=false",
  "trust/vc": "registered_issuer=ok;unregistered=unknown issuer;key_mismatch=issuer signature invalid",
  "revocation/vc": "before=ok;after_revoke=revoked;revoke_again=revoked",
  "privacy/vc": "disclosed=name;gpa_in_report=false;gpa_bytes_in_presentation=false",
  "security/vc": "honest=ok;challenge_replay=challenge mismatch;tampered_value=commitment mismatch,holder signature invalid",
  "validity/vc": "before_window=not yet valid;within=ok;at_until=expired",
  "verification/vc": "memory=ok;file=ok;ledger=ok",
  "authentication/vc": "holder_proof=ok;name=alice;attacker_derive=wrong holder key;attacker_signature=holder signature invalid",
  "functionality/vc": "commitments=3;disclosed_count=2;program=CS;unknown_label=unknown label",
  "trust/contract": "non_owner=not owner;one_endorsement=insufficient endorsements;two_endorsements=accepted",
  "revocation/contract": "verify_before=ok;bridge_before=ok;after_revoke=revoked;bridge_after=revoked",
  "privacy/contract": "record_readable=true;gpa_public=true;nonmember_read=access denied",
  "security/contract": "honest_replay=ok;forged_sender=bad sender signature;bitflip_replay=broken chain",
  "validity/contract": "verify_at_issue=ok;verify_many_blocks_later=ok;after_revoke=revoked",
  "verification/contract": "bridge=ok;wrong_key=jwt signature invalid;altered_gpa=payload mismatch,mismatch",
  "authentication/contract": "unknown_sender=unknown account;owner_issue=accepted;owner_of_1=alice",
  "functionality/contract": "tokens=2;verify=ok;get_program=CS;bad_gpa=bad gpa;duplicate=duplicate certificate"
}
)fixture";

}  // namespace

const std::map<std::string, std::string>& expected_fixtures() {
  static const std::map<std::string, std::string> fixtures = [] {
    auto doc = nlohmann::json::parse(kExpectedTable);
    std::map<std::string, std::string> out;
    for (const auto& [name, expected] : doc.items())
      out.emplace(name, expected.get<std::string>());
    return out;
  }();
  return fixtures;
}

}  // namespace triauth::harness
