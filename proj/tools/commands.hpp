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

#include <nlohmann/json.hpp>

#include "workspace.hpp"

namespace triauth::tool {

// One result shape for both surfaces: the CLI prints `body` (and maps ok to
// the exit code), the HTTP service sends it (and maps ok to the status).
// Verification bodies carry {"valid": ..., "reasons": [...]} so both
// surfaces agree byte for byte.
struct CommandResult {
  bool ok = false;
  nlohmann::ordered_json body;
};

CommandResult cmd_keygen(Workspace& ws, const std::string& key_id);

CommandResult cmd_token_issue(Workspace& ws, const std::string& sub,
                              const std::vector<std::string>& scopes,
                              const std::optional<std::string>& aud,
                              std::optional<std::int64_t> ttl);
CommandResult cmd_token_verify(Workspace& ws, const std::string& token,
                               const std::optional<std::string>& aud);
CommandResult cmd_token_refresh(Workspace& ws, const std::string& refresh_id);
CommandResult cmd_token_revoke(Workspace& ws, const std::string& refresh_id);

CommandResult cmd_vc_register_issuer(Workspace& ws,
                                     const std::string& issuer_id,
                                     const std::string& key_id);
CommandResult cmd_vc_issue(Workspace& ws, const std::string& issuer_id,
                           const std::string& key_id,
                           const std::string& holder,
                           const std::map<std::string, std::string>& attrs,
                           std::int64_t valid_from, std::int64_t valid_until,
                           const std::string& out_credential,
                           const std::string& out_secrets);
CommandResult cmd_vc_present(Workspace& ws, const std::string& credential_file,
                             const std::string& secrets_file,
                             const std::string& holder_key_id,
                             const std::vector<std::string>& disclose,
                             const std::string& challenge,
                             const std::string& out_presentation);
CommandResult cmd_vc_verify(Workspace& ws, const std::string& presentation,
                            const std::string& challenge);
CommandResult cmd_vc_revoke(Workspace& ws, const std::string& status_id);

struct ChannelSpec {
  std::string id;
  std::size_t threshold = 0;
  std::vector<std::string> members;
  std::vector<std::string> peers;
};

CommandResult cmd_ledger_init(Workspace& ws, const std::string& profile,
                              const std::vector<std::string>& account_keys,
                              const std::vector<std::pair<std::string,
                                                          std::string>>& peers,
                              const std::vector<ChannelSpec>& channels,
                              bool force);
CommandResult cmd_ledger_submit(
    Workspace& ws, const std::string& sender_key_id,
    const std::string& channel, const std::string& contract,
    const std::string& method, const std::vector<std::string>& args,
    const std::vector<std::pair<std::string, std::string>>& endorsers);
CommandResult cmd_ledger_replay(Workspace& ws);
CommandResult cmd_ledger_root(Workspace& ws);

CommandResult cmd_cert_issue(Workspace& ws, const std::string& sender_key_id,
                             const std::string& channel,
                             const std::vector<std::pair<std::string,
                                                         std::string>>&
                                 endorsers,
                             const std::string& name,
                             const std::string& program,
                             const std::string& graduation_date,
                             const std::string& gpa, bool with_proof);
CommandResult cmd_cert_verify(Workspace& ws, const std::string& id,
                              const std::string& name,
                              const std::string& program,
                              const std::string& graduation_date,
                              const std::string& gpa,
                              const std::string& channel);
CommandResult cmd_cert_revoke(Workspace& ws, const std::string& sender_key_id,
                              const std::string& channel,
                              const std::vector<std::pair<std::string,
                                                          std::string>>&
                                  endorsers,
                              const std::string& id);

CommandResult cmd_bridge_issue(Workspace& ws,
                               const std::string& sender_key_id,
                               const std::string& token_key_id,
                               const std::string& issuer_id,
                               const std::string& name,
                               const std::string& program,
                               const std::string& graduation_date,
                               const std::string& gpa);
CommandResult cmd_bridge_verify(Workspace& ws, const std::string& jwt,
                                const std::string& token_key);

CommandResult cmd_harness_run(const std::string& out_dir);

}  // namespace triauth::tool
