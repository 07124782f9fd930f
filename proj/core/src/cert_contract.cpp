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

#include <nlohmann/json.hpp>

#include "triauth/encoding.hpp"
#include "triauth/error.hpp"

namespace triauth::cert {

namespace {

bool gpa_well_formed(const std::string& gpa) {
  // ^[0-4]\.[0-9]{2}$ and at most 4.00
  if (gpa.size() != 4 || gpa[1] != '.') return false;
  if (gpa[0] < '0' || gpa[0] > '4') return false;
  if (gpa[2] < '0' || gpa[2] > '9' || gpa[3] < '0' || gpa[3] > '9') {
    return false;
  }
  return gpa[0] != '4' || (gpa[2] == '0' && gpa[3] == '0');
}

nlohmann::ordered_json certificate_json(const Certificate& cert) {
  nlohmann::ordered_json doc;
  doc["name"] = cert.name;
  doc["program"] = cert.program;
  doc["graduation_date"] = cert.graduation_date;
  doc["gpa"] = cert.gpa;
  doc["sig"] = cert.signature.to_b64url();
  if (cert.issuer_proof) doc["issuer_proof"] = *cert.issuer_proof;
  return doc;
}

Certificate certificate_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  Certificate cert;
  cert.name = doc.at("name").get<std::string>();
  cert.program = doc.at("program").get<std::string>();
  cert.graduation_date = doc.at("graduation_date").get<std::string>();
  cert.gpa = doc.at("gpa").get<std::string>();
  cert.signature =
      crypto::Digest::from_b64url(doc.at("sig").get<std::string>());
  if (doc.contains("issuer_proof")) {
    cert.issuer_proof = doc["issuer_proof"].get<std::string>();
  }
  return cert;
}

void require_arity(const std::vector<std::string>& args, std::size_t min,
                   std::size_t max, const char* method) {
  if (args.size() < min || args.size() > max) {
    throw Error(errc::bad_transaction,
                std::string(method) + ": wrong argument count");
  }
}

// Owner gating applies on the permissionless profile; the permissioned
// profile relies on the channel's endorsement policy instead.
void check_issue_auth(ledger::ContractContext& ctx) {
  if (ctx.profile_kind() != ledger::ProfileKind::permissionless) return;
  auto owner = ctx.get("owner");
  if (!owner) throw Error(errc::not_initialized, "no contract owner yet");
  if (*owner != ctx.sender().to_b64url()) throw Error(errc::not_owner);
}

std::string do_init(ledger::ContractContext& ctx,
                    const std::vector<std::string>& args) {
  require_arity(args, 0, 0, "init");
  if (ctx.get("owner")) throw Error(errc::already_initialized);
  ctx.put("owner", ctx.sender().to_b64url());
  return "ok";
}

std::string do_issue(ledger::ContractContext& ctx,
                     const std::vector<std::string>& args) {
  require_arity(args, 4, 5, "issue");
  check_issue_auth(ctx);

  const std::string& name = args[0];
  const std::string& program = args[1];
  const std::string& graduation_date = args[2];
  const std::string& gpa = args[3];
  if (name.empty() || program.empty() || graduation_date.empty() ||
      gpa.empty()) {
    throw Error(errc::empty_field);
  }
  if (!gpa_well_formed(gpa)) {
    throw Error(errc::bad_gpa, "gpa '" + gpa + "' not a two-decimal value "
                               "in [0.00, 4.00]");
  }

  Certificate cert;
  cert.name = name;
  cert.program = program;
  cert.graduation_date = graduation_date;
  cert.gpa = gpa;
  cert.signature = certificate_digest(name, program, graduation_date, gpa);
  std::string id = cert.signature.to_b64url();

  if (ctx.get("cert/" + id)) {
    throw Error(errc::duplicate_certificate, "certificate already stored");
  }

  if (args.size() == 5) {
    crypto::Signature proof;
    try {
      proof = crypto::Signature::from_b64url(args[4]);
    } catch (const Error&) {
      throw Error(errc::bad_signature, "issuer proof is not a signature");
    }
    if (!crypto::verify(ctx.sender(), cert.signature.bytes, proof)) {
      throw Error(errc::bad_signature, "issuer proof does not verify");
    }
    cert.issuer_proof = args[4];
  }

  std::string next = ctx.get("next_token").value_or("1");
  ctx.put("cert/" + id, certificate_json(cert).dump());
  ctx.put("token/" + next, name);
  ctx.put("next_token", std::to_string(std::stoull(next) + 1));
  return id;
}

std::string do_verify(ledger::ContractContext& ctx,
                      const std::vector<std::string>& args) {
  require_arity(args, 5, 5, "verify");
  auto stored = ctx.get("cert/" + args[0]);
  if (!stored) return "false:unknown";
  Certificate cert = certificate_from_json(*stored);
  crypto::Digest recomputed =
      certificate_digest(args[1], args[2], args[3], args[4]);
  if (recomputed != cert.signature) return "false:mismatch";
  if (ctx.get("revoked/" + args[0])) return "false:revoked";
  return "true";
}

std::string do_revoke(ledger::ContractContext& ctx,
                      const std::vector<std::string>& args) {
  require_arity(args, 1, 1, "revoke");
  check_issue_auth(ctx);
  if (!ctx.get("cert/" + args[0])) {
    throw Error(errc::unknown_certificate, "no certificate " + args[0]);
  }
  ctx.put("revoked/" + args[0], "1");
  return "ok";
}

std::string do_get(ledger::ContractContext& ctx,
                   const std::vector<std::string>& args) {
  require_arity(args, 1, 1, "get");
  auto stored = ctx.get("cert/" + args[0]);
  if (!stored) {
    throw Error(errc::unknown_certificate, "no certificate " + args[0]);
  }
  return *stored;
}

std::string do_owner_of(ledger::ContractContext& ctx,
                        const std::vector<std::string>& args) {
  require_arity(args, 1, 1, "owner_of");
  auto owner = ctx.get("token/" + args[0]);
  if (!owner) throw Error(errc::unknown_token, "no token " + args[0]);
  return *owner;
}

std::string do_token_count(ledger::ContractContext& ctx,
                           const std::vector<std::string>& args) {
  require_arity(args, 0, 0, "token_count");
  std::string next = ctx.get("next_token").value_or("1");
  return std::to_string(std::stoull(next) - 1);
}

}  // namespace

crypto::Digest certificate_digest(const std::string& name,
                                  const std::string& program,
                                  const std::string& graduation_date,
                                  const std::string& gpa) {
  crypto::CanonicalRecord record;
  record.add("N", name);
  record.add("P", program);
  record.add("GD", graduation_date);
  record.add("G", gpa);
  return crypto::sha256(crypto::canonical_encode(record));
}

std::string certificate_id(const std::string& name, const std::string& program,
                           const std::string& graduation_date,
                           const std::string& gpa) {
  return certificate_digest(name, program, graduation_date, gpa).to_b64url();
}

std::string contract_main(ledger::ContractContext& ctx,
                          const std::string& method,
                          const std::vector<std::string>& args) {
  if (method == "init") return do_init(ctx, args);
  if (method == "issue") return do_issue(ctx, args);
  if (method == "verify") return do_verify(ctx, args);
  if (method == "revoke") return do_revoke(ctx, args);
  if (method == "get") return do_get(ctx, args);
  if (method == "owner_of") return do_owner_of(ctx, args);
  if (method == "token_count") return do_token_count(ctx, args);
  throw Error(errc::bad_transaction, "certificate: unknown method " + method);
}

namespace {

[[noreturn]] void throw_rejection(const ledger::Receipt& receipt) {
  if (auto code = errc_from_name(receipt.reason)) {
    throw Error(*code, "rejected: " + receipt.reason);
  }
  throw Error(errc::bad_transaction, "rejected: " + receipt.reason);
}

}  // namespace

void init_contract(ledger::Ledger& ledger, const ledger::TxAuth& auth) {
  auto receipt = ledger::submit_as(ledger, auth, std::string(kContractId),
                                   "init", {});
  if (!receipt.accepted) throw_rejection(receipt);
}

std::string make_issuer_proof(const crypto::KeyPair& issuer,
                              const std::string& name,
                              const std::string& program,
                              const std::string& graduation_date,
                              const std::string& gpa) {
  auto digest = certificate_digest(name, program, graduation_date, gpa);
  return crypto::sign(issuer.private_key, digest.bytes).to_b64url();
}

std::string issue_certificate(ledger::Ledger& ledger,
                              const ledger::TxAuth& auth,
                              const std::string& name,
                              const std::string& program,
                              const std::string& graduation_date,
                              const std::string& gpa,
                              const std::optional<std::string>& issuer_proof) {
  std::vector<std::string> args = {name, program, graduation_date, gpa};
  if (issuer_proof) args.push_back(*issuer_proof);
  auto receipt = ledger::submit_as(ledger, auth, std::string(kContractId),
                                   "issue", std::move(args));
  if (!receipt.accepted) throw_rejection(receipt);
  return receipt.result;
}

VerifyOutcome verify_certificate(const ledger::Ledger& ledger,
                                 const std::string& id,
                                 const std::string& name,
                                 const std::string& program,
                                 const std::string& graduation_date,
                                 const std::string& gpa,
                                 const std::string& channel) {
  auto result = ledger.query(channel, std::string(kContractId), "verify",
                             {id, name, program, graduation_date, gpa});
  if (result.value == "true") return {true, ""};
  return {false, result.value.substr(6)};  // strip "false:"
}

void revoke_certificate(ledger::Ledger& ledger, const ledger::TxAuth& auth,
                        const std::string& id) {
  auto receipt = ledger::submit_as(ledger, auth, std::string(kContractId),
                                   "revoke", {id});
  if (!receipt.accepted) throw_rejection(receipt);
}

Certificate get_certificate(const ledger::Ledger& ledger,
                            const std::string& id,
                            const std::string& channel) {
  auto result = ledger.query(channel, std::string(kContractId), "get", {id});
  return certificate_from_json(result.value);
}

std::string owner_of(const ledger::Ledger& ledger, std::uint64_t token_id,
                     const std::string& channel) {
  auto result = ledger.query(channel, std::string(kContractId), "owner_of",
                             {std::to_string(token_id)});
  return result.value;
}

std::uint64_t token_count(const ledger::Ledger& ledger,
                          const std::string& channel) {
  auto result =
      ledger.query(channel, std::string(kContractId), "token_count", {});
  return std::stoull(result.value);
}

}  // namespace triauth::cert
