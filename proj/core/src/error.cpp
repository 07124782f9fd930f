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

#include "triauth/error.hpp"

namespace triauth {

std::string_view errc_name(errc code) noexcept {
  switch (code) {
    case errc::empty_record: return "empty record";
    case errc::duplicate_label: return "duplicate label";
    case errc::bad_seed_length: return "bad seed length";
    case errc::malformed_key: return "malformed key";
    case errc::malformed_signature: return "malformed signature";
    case errc::bad_encoding: return "bad encoding";
    case errc::duplicate_key_id: return "duplicate key id";
    case errc::unknown_key_id: return "unknown key id";
    case errc::bad_scope: return "bad scope";
    case errc::ttl_too_long: return "ttl too long";
    case errc::bad_signature: return "bad signature";
    case errc::expired: return "expired";
    case errc::not_yet_valid: return "not yet valid";
    case errc::audience_mismatch: return "audience mismatch";
    case errc::malformed_token: return "malformed token";
    case errc::unknown_refresh_token: return "unknown refresh token";
    case errc::revoked_token: return "revoked token";
    case errc::duplicate_issuer: return "duplicate issuer";
    case errc::unknown_issuer: return "unknown issuer";
    case errc::empty_attributes: return "empty attributes";
    case errc::bad_validity: return "bad validity";
    case errc::unknown_label: return "unknown label";
    case errc::wrong_holder_key: return "wrong holder key";
    case errc::unknown_status_id: return "unknown status id";
    case errc::bad_policy: return "bad policy";
    case errc::not_permissioned: return "not permissioned";
    case errc::unknown_peer: return "unknown peer";
    case errc::duplicate_channel: return "duplicate channel";
    case errc::unknown_channel: return "unknown channel";
    case errc::not_in_policy: return "not in policy";
    case errc::access_denied: return "access denied";
    case errc::broken_chain: return "broken chain";
    case errc::unknown_contract: return "unknown contract";
    case errc::unknown_account: return "unknown account";
    case errc::bad_transaction: return "bad transaction";
    case errc::read_only_context: return "read only context";
    case errc::not_owner: return "not owner";
    case errc::insufficient_endorsements: return "insufficient endorsements";
    case errc::duplicate_certificate: return "duplicate certificate";
    case errc::bad_gpa: return "bad gpa";
    case errc::empty_field: return "empty field";
    case errc::unknown_certificate: return "unknown certificate";
    case errc::unknown_token: return "unknown token";
    case errc::already_initialized: return "already initialized";
    case errc::not_initialized: return "not initialized";
    case errc::signing_failure: return "signing failure";
    case errc::scenario_panic: return "scenario panic";
    case errc::corrupt_workspace: return "corrupt workspace";
    case errc::usage: return "usage";
  }
  return "unknown error";
}

std::optional<errc> errc_from_name(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(errc::usage); ++i) {
    auto code = static_cast<errc>(i);
    if (errc_name(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace triauth
