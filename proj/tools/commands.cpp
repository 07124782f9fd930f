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

#include "commands.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "triauth/cert_contract.hpp"
#include "triauth/encoding.hpp"
#include "triauth/error.hpp"
#include "triauth/harness.hpp"
#include "triauth/vc_bridge.hpp"

namespace triauth::tool {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) throw Error(errc::corrupt_workspace, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.good()) throw Error(errc::corrupt_workspace, path);
}

CommandResult okay(ordered_json body) { return {true, std::move(body)}; }

CommandResult verdict(bool valid, std::vector<std::string> reasons,
                      ordered_json extra = ordered_json::object()) {
  ordered_json body;
  body["valid"] = valid;
  for (auto& [key, value] : extra.items()) body[key] = std::move(value);
  body["reasons"] = std::move(reasons);
  return {valid, std::move(body)};
}

crypto::PublicKey resolve_public_key(Workspace& ws, const std::string& text) {
  try {
    return crypto::PublicKey::from_b64url(text);
  } catch (const Error&) {
    return ws.keystore().get(text).public_key;
  }
}

ledger::TxAuth make_auth(
    Workspace& ws, const std::string& sender_key_id,
    const std::string& channel,
    const std::vector<std::pair<std::string, std::string>>& endorsers) {
  ledger::TxAuth auth;
  auth.sender = ws.keystore().get(sender_key_id);
  auth.channel = channel;
  for (const auto& [peer_id, key_id] : endorsers)
    auth.endorsers.emplace_back(peer_id,
                                ws.keystore().get(key_id).private_key);
  return auth;
}

// First issuance on the permissionless profile claims ownership for the
// sender; later calls are no-ops.
void ensure_owner(Workspace& ws, const ledger::TxAuth& auth) {
  auto& lgr = ws.ledger();
  if (lgr.profile().kind != ledger::ProfileKind::permissionless) return;
  auto owner = lgr.read_state(auth.channel, std::string(cert::kContractId),
                              "owner");
  if (!owner) cert::init_contract(lgr, auth);
}

ordered_json claims_json(const scitokens::TokenClaims& claims) {
  ordered_json doc;
  doc["iss"] = claims.iss;
  doc["sub"] = claims.sub;
  if (claims.aud) doc["aud"] = *claims.aud;
  doc["scope"] = claims.scope;
  if (claims.nbf) doc["nbf"] = *claims.nbf;
  doc["iat"] = claims.iat;
  doc["exp"] = claims.exp;
  doc["jti"] = claims.jti;
  return doc;
}

}  // namespace

CommandResult cmd_keygen(Workspace& ws, const std::string& key_id) {
  // The id is mixed into the derivation: under a fixed --seed every process
  // starts from the same stream, and without this, `keygen --id a` and
  // `keygen --id b` run as separate invocations would mint the same key.
  auto base = ws.rng().bytes32();
  auto digest = crypto::sha256(crypto::canonical_encode(
      {{"keygen", triauth::b64url_encode(std::span<const std::uint8_t>(base))},
       {"id", key_id}}));
  auto pair =
      crypto::keygen(std::span<const std::uint8_t>(digest.bytes), key_id);
  ws.keystore().put(pair);
  ws.save_keystore();
  ordered_json body;
  body["key_id"] = pair.key_id;
  body["public_key"] = pair.public_key.to_b64url();
  return okay(std::move(body));
}

CommandResult cmd_token_issue(Workspace& ws, const std::string& sub,
                              const std::vector<std::string>& scopes,
                              const std::optional<std::string>& aud,
                              std::optional<std::int64_t> ttl) {
  auto& issuer = ws.issuer();
  auto now = ws.now();
  auto access = issuer.issue_access_token(sub, scopes, ttl, now, aud);
  auto refresh = issuer.issue_refresh_token(sub, scopes, now);
  ws.save_issuer();
  ordered_json body;
  body["access_token"] = access;
  body["refresh_token"] = refresh.id;
  body["token_type"] = "Bearer";
  body["expires_in"] = ttl ? *ttl : issuer.access_ttl();
  return okay(std::move(body));
}

CommandResult cmd_token_verify(Workspace& ws, const std::string& token,
                               const std::optional<std::string>& aud) {
  const auto& key = ws.issuer().public_key();
  try {
    auto claims = scitokens::verify_access_token(token, key, ws.now(), aud);
    return verdict(true, {}, ordered_json{{"claims", claims_json(claims)}});
  } catch (const Error& e) {
    return verdict(false, {std::string(errc_name(e.code()))});
  }
}

CommandResult cmd_token_refresh(Workspace& ws, const std::string& refresh_id) {
  auto access = ws.issuer().refresh(refresh_id, ws.now());
  ws.save_issuer();
  ordered_json body;
  body["access_token"] = access;
  body["token_type"] = "Bearer";
  return okay(std::move(body));
}

CommandResult cmd_token_revoke(Workspace& ws, const std::string& refresh_id) {
  ws.issuer().revoke_refresh(refresh_id);
  ws.save_issuer();
  ordered_json body;
  body["revoked"] = refresh_id;
  return okay(std::move(body));
}

CommandResult cmd_vc_register_issuer(Workspace& ws,
                                     const std::string& issuer_id,
                                     const std::string& key_id) {
  const auto& pair = ws.keystore().get(key_id);
  ws.registry().register_issuer(issuer_id, pair.public_key);
  ordered_json body;
  body["issuer_id"] = issuer_id;
  body["public_key"] = pair.public_key.to_b64url();
  return okay(std::move(body));
}

CommandResult cmd_vc_issue(Workspace& ws, const std::string& issuer_id,
                           const std::string& key_id,
                           const std::string& holder,
                           const std::map<std::string, std::string>& attrs,
                           std::int64_t valid_from, std::int64_t valid_until,
                           const std::string& out_credential,
                           const std::string& out_secrets) {
  const auto& issuer_key = ws.keystore().get(key_id);
  auto holder_pk = resolve_public_key(ws, holder);
  auto issued =
      vcred::issue_credential(issuer_key, issuer_id, holder_pk, attrs,
                              valid_from, valid_until, ws.registry(),
                              ws.rng());
  write_file(out_credential, issued.credential.to_json() + "\n");
  write_file(out_secrets, vcred::attribute_store_json(issued.attributes) +
                              "\n");
  ordered_json body;
  body["credential_id"] = issued.credential.id;
  body["status_id"] = issued.credential.status_id;
  body["credential_file"] = out_credential;
  body["secrets_file"] = out_secrets;
  return okay(std::move(body));
}

CommandResult cmd_vc_present(Workspace& ws, const std::string& credential_file,
                             const std::string& secrets_file,
                             const std::string& holder_key_id,
                             const std::vector<std::string>& disclose,
                             const std::string& challenge,
                             const std::string& out_presentation) {
  auto credential =
      vcred::VerifiableCredential::from_json(read_file(credential_file));
  auto secrets = vcred::attribute_store_from_json(read_file(secrets_file));
  const auto& holder_key = ws.keystore().get(holder_key_id);
  std::set<std::string> labels(disclose.begin(), disclose.end());
  auto presentation = vcred::derive_presentation(credential, holder_key,
                                                 labels, challenge, secrets);
  write_file(out_presentation, presentation.to_json() + "\n");
  ordered_json body;
  body["presentation_file"] = out_presentation;
  body["disclosed"] = std::vector<std::string>(labels.begin(), labels.end());
  return okay(std::move(body));
}

CommandResult cmd_vc_verify(Workspace& ws, const std::string& presentation,
                            const std::string& challenge) {
  vcred::Presentation pres;
  try {
    pres = vcred::Presentation::from_json(presentation);
  } catch (const Error&) {
    throw Error(errc::bad_encoding, "presentation does not parse");
  }
  auto report =
      vcred::verify_presentation(pres, ws.registry(), challenge, ws.now());
  ordered_json disclosed = ordered_json::object();
  for (const auto& [label, value] : report.disclosed) disclosed[label] = value;
  return verdict(report.valid, report.reasons,
                 ordered_json{{"disclosed", std::move(disclosed)}});
}

CommandResult cmd_vc_revoke(Workspace& ws, const std::string& status_id) {
  vcred::revoke_credential(ws.registry(), status_id);
  ordered_json body;
  body["revoked"] = status_id;
  return okay(std::move(body));
}

CommandResult cmd_ledger_init(
    Workspace& ws, const std::string& profile,
    const std::vector<std::string>& account_keys,
    const std::vector<std::pair<std::string, std::string>>& peers,
    const std::vector<ChannelSpec>& channels, bool force) {
  if (ws.has_ledger() && !force)
    throw Error(errc::bad_transaction,
                "ledger.journal already exists; pass --force to reinitialize");

  ledger::Ledger fresh = [&] {
    if (profile == "permissionless") {
      std::vector<crypto::PublicKey> accounts;
      if (account_keys.empty()) {
        for (const auto& id : ws.keystore().key_ids())
          accounts.push_back(ws.keystore().get(id).public_key);
      } else {
        for (const auto& id : account_keys)
          accounts.push_back(ws.keystore().get(id).public_key);
      }
      return ledger::Ledger::init(
          ledger::LedgerProfile::permissionless(std::move(accounts)));
    }
    if (profile == "permissioned") {
      std::vector<ledger::Peer> peer_list;
      for (const auto& [peer_id, key_id] : peers)
        peer_list.push_back(
            {peer_id, ws.keystore().get(key_id).public_key});
      return ledger::Ledger::init(
          ledger::LedgerProfile::permissioned(std::move(peer_list)));
    }
    throw Error(errc::bad_policy, "profile must be permissionless or "
                                  "permissioned");
  }();

  for (const auto& spec : channels)
    fresh.create_channel(spec.id, spec.members,
                         {spec.threshold, spec.peers});

  ws.reset_ledger(std::move(fresh));
  ordered_json body;
  body["profile"] = profile;
  body["height"] = ws.ledger().height();
  body["state_root"] = ws.ledger().state_root().to_b64url();
  return okay(std::move(body));
}

CommandResult cmd_ledger_submit(
    Workspace& ws, const std::string& sender_key_id,
    const std::string& channel, const std::string& contract,
    const std::string& method, const std::vector<std::string>& args,
    const std::vector<std::pair<std::string, std::string>>& endorsers) {
  auto auth = make_auth(ws, sender_key_id, channel, endorsers);
  auto receipt = ledger::submit_as(ws.ledger(), auth, contract, method, args);
  ws.sync_ledger();
  ordered_json body;
  body["accepted"] = receipt.accepted;
  if (receipt.accepted) {
    body["block_height"] = receipt.block_height;
    body["result"] = receipt.result;
  } else {
    body["reason"] = receipt.reason;
  }
  body["state_root"] = ws.ledger().state_root().to_b64url();
  return {receipt.accepted, std::move(body)};
}

CommandResult cmd_ledger_replay(Workspace& ws) {
  try {
    auto [profile, blocks] = ledger::Journal::read(ws.journal_path());
    auto replayed = ledger::Ledger::replay(profile, blocks);
    ordered_json extra;
    extra["height"] = replayed.height();
    extra["state_root"] = replayed.state_root().to_b64url();
    return verdict(true, {}, std::move(extra));
  } catch (const Error& e) {
    if (e.code() != errc::broken_chain) throw;
    return verdict(false, {std::string(errc_name(e.code()))});
  }
}

CommandResult cmd_ledger_root(Workspace& ws) {
  ordered_json body;
  body["height"] = ws.ledger().height();
  body["state_root"] = ws.ledger().state_root().to_b64url();
  return okay(std::move(body));
}

CommandResult cmd_cert_issue(
    Workspace& ws, const std::string& sender_key_id,
    const std::string& channel,
    const std::vector<std::pair<std::string, std::string>>& endorsers,
    const std::string& name, const std::string& program,
    const std::string& graduation_date, const std::string& gpa,
    bool with_proof) {
  auto auth = make_auth(ws, sender_key_id, channel, endorsers);
  ensure_owner(ws, auth);
  std::optional<std::string> proof;
  if (with_proof)
    proof = cert::make_issuer_proof(auth.sender, name, program,
                                    graduation_date, gpa);
  auto id = cert::issue_certificate(ws.ledger(), auth, name, program,
                                    graduation_date, gpa, proof);
  ws.sync_ledger();
  ordered_json body;
  body["certificate_id"] = id;
  body["state_root"] = ws.ledger().state_root().to_b64url();
  return okay(std::move(body));
}

CommandResult cmd_cert_verify(Workspace& ws, const std::string& id,
                              const std::string& name,
                              const std::string& program,
                              const std::string& graduation_date,
                              const std::string& gpa,
                              const std::string& channel) {
  auto outcome = cert::verify_certificate(ws.ledger(), id, name, program,
                                          graduation_date, gpa, channel);
  std::vector<std::string> reasons;
  if (!outcome.valid) reasons.push_back(outcome.reason);
  return verdict(outcome.valid, std::move(reasons));
}

CommandResult cmd_cert_revoke(
    Workspace& ws, const std::string& sender_key_id,
    const std::string& channel,
    const std::vector<std::pair<std::string, std::string>>& endorsers,
    const std::string& id) {
  auto auth = make_auth(ws, sender_key_id, channel, endorsers);
  cert::revoke_certificate(ws.ledger(), auth, id);
  ws.sync_ledger();
  ordered_json body;
  body["revoked"] = id;
  body["state_root"] = ws.ledger().state_root().to_b64url();
  return okay(std::move(body));
}

CommandResult cmd_bridge_issue(Workspace& ws,
                               const std::string& sender_key_id,
                               const std::string& token_key_id,
                               const std::string& issuer_id,
                               const std::string& name,
                               const std::string& program,
                               const std::string& graduation_date,
                               const std::string& gpa) {
  auto auth = make_auth(ws, sender_key_id,
                        std::string(ledger::kDefaultChannel), {});
  ensure_owner(ws, auth);
  const auto& token_key = ws.keystore().get(token_key_id);
  auto bridged = bridge::issue(ws.ledger(), auth, token_key, issuer_id, name,
                               program, graduation_date, gpa);
  ws.sync_ledger();
  ordered_json body;
  body["certificate_id"] = bridged.certificate_id;
  body["jwt"] = bridged.jwt;
  return okay(std::move(body));
}

CommandResult cmd_bridge_verify(Workspace& ws, const std::string& jwt,
                                const std::string& token_key) {
  auto key = resolve_public_key(ws, token_key);
  auto report = bridge::verify(ws.ledger(), jwt, key);
  return verdict(report.valid, report.reasons);
}

CommandResult cmd_harness_run(const std::string& out_dir) {
  auto matrix = harness::run_matrix();
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file((dir / "matrix.json").string(), matrix.to_json());
  write_file((dir / "matrix.txt").string(), matrix.to_text());
  auto body = ordered_json::parse(matrix.to_json());
  return {matrix.all_match(), std::move(body)};
}

}  // namespace triauth::tool
