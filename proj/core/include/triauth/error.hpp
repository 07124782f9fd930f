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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace triauth {

// Every failure the toolkit can signal. Verification-style operations
// (verify_presentation, verify_certificate, ledger submit, ...) report
// negative outcomes in their result values instead of throwing; the codes
// below cover precondition violations and hard errors.
enum class errc {
  // crypto
  empty_record,
  duplicate_label,
  bad_seed_length,
  malformed_key,
  malformed_signature,
  bad_encoding,
  duplicate_key_id,
  unknown_key_id,
  // tokens
  bad_scope,
  ttl_too_long,
  bad_signature,
  expired,
  not_yet_valid,
  audience_mismatch,
  malformed_token,
  unknown_refresh_token,
  revoked_token,
  // credentials
  duplicate_issuer,
  unknown_issuer,
  empty_attributes,
  bad_validity,
  unknown_label,
  wrong_holder_key,
  unknown_status_id,
  // ledger
  bad_policy,
  not_permissioned,
  unknown_peer,
  duplicate_channel,
  unknown_channel,
  not_in_policy,
  access_denied,
  broken_chain,
  unknown_contract,
  unknown_account,
  bad_transaction,
  read_only_context,
  // certificate contract
  not_owner,
  insufficient_endorsements,
  duplicate_certificate,
  bad_gpa,
  empty_field,
  unknown_certificate,
  unknown_token,
  already_initialized,
  not_initialized,
  // bridge / harness / cli
  signing_failure,
  scenario_panic,
  corrupt_workspace,
  usage,
};

// Stable lower-case name, e.g. "bad signature". These strings are part of
// the external surface: receipts, verification reasons, CLI/HTTP output and
// the harness fixtures all use them verbatim.
std::string_view errc_name(errc code) noexcept;

// Reverse of errc_name; empty for strings that are not code names.
std::optional<errc> errc_from_name(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  explicit Error(errc code)
      : std::runtime_error(std::string(errc_name(code))), code_(code) {}

  errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

}  // namespace triauth
