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

#include "triauth/cert_contract.hpp"
#include "triauth/error.hpp"
#include "triauth/ledger.hpp"

namespace triauth::ledger {

namespace {

void require_arity(const std::vector<std::string>& args, std::size_t n,
                   const char* method) {
  if (args.size() != n) {
    throw Error(errc::bad_transaction,
                std::string(method) + ": wrong argument count");
  }
}

// On-ledger issuer-key and status registry backing the ledger-backed
// credential registry. Writes go through transactions; reads are queries.
std::string registry_contract(ContractContext& ctx, const std::string& method,
                              const std::vector<std::string>& args) {
  if (method == "register_issuer") {
    require_arity(args, 2, "register_issuer");
    if (args[0].empty()) throw Error(errc::empty_field, "empty issuer id");
    crypto::PublicKey::from_b64url(args[1]);  // malformed_key on bad input
    if (ctx.get("issuer/" + args[0])) {
      throw Error(errc::duplicate_issuer, "issuer '" + args[0] + "' exists");
    }
    ctx.put("issuer/" + args[0], args[1]);
    return "ok";
  }
  if (method == "add_status") {
    require_arity(args, 1, "add_status");
    if (args[0].empty()) throw Error(errc::empty_field, "empty status id");
    if (ctx.get("status/" + args[0])) {
      throw Error(errc::bad_transaction, "status id already present");
    }
    ctx.put("status/" + args[0], "active");
    return "ok";
  }
  if (method == "revoke_status") {
    require_arity(args, 1, "revoke_status");
    if (!ctx.get("status/" + args[0])) {
      throw Error(errc::unknown_status_id, "no status " + args[0]);
    }
    ctx.put("status/" + args[0], "revoked");
    return "ok";
  }
  if (method == "get_issuer") {
    require_arity(args, 1, "get_issuer");
    auto key = ctx.get("issuer/" + args[0]);
    if (!key) throw Error(errc::unknown_issuer, "no issuer " + args[0]);
    return *key;
  }
  if (method == "get_status") {
    require_arity(args, 1, "get_status");
    auto status = ctx.get("status/" + args[0]);
    if (!status) throw Error(errc::unknown_status_id, "no status " + args[0]);
    return *status;
  }
  throw Error(errc::bad_transaction, "registry: unknown method " + method);
}

}  // namespace

ContractFn find_app_contract(const std::string& contract_id) {
  if (contract_id == cert::kContractId) return &cert::contract_main;
  if (contract_id == "vc-registry") return &registry_contract;
  return nullptr;
}

}  // namespace triauth::ledger
