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

#include "triauth/vc_bridge.hpp"

#include <optional>

#include <nlohmann/json.hpp>

#include "triauth/error.hpp"
#include "triauth/jose.hpp"

namespace triauth::bridge {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Payload {
  std::string certificate_id;
  std::string name;
  std::string program;
  std::string graduation_date;
  std::string gpa;
  std::string ledger_profile;
  std::string issuer_id;
};

std::optional<std::string> string_claim(const ordered_json& doc,
                                        const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<Payload> extract(const ordered_json& doc) {
  Payload p;
  auto read = [&](const char* key, std::string Payload::*member) {
    auto v = string_claim(doc, key);
    if (v) p.*member = *v;
    return v.has_value();
  };
  if (!read("certificate_id", &Payload::certificate_id)) return std::nullopt;
  if (!read("name", &Payload::name)) return std::nullopt;
  if (!read("program", &Payload::program)) return std::nullopt;
  if (!read("graduation_date", &Payload::graduation_date)) return std::nullopt;
  if (!read("gpa", &Payload::gpa)) return std::nullopt;
  if (!read("ledger_profile", &Payload::ledger_profile)) return std::nullopt;
  if (!read("issuer_id", &Payload::issuer_id)) return std::nullopt;
  return p;
}

std::string profile_name(const ledger::Ledger& ledger) {
  return std::string(ledger::profile_kind_name(ledger.profile().kind));
}

}  // namespace

BridgedCertificate issue(ledger::Ledger& ledger, const ledger::TxAuth& auth,
                         const crypto::KeyPair& token_key,
                         const std::string& issuer_id, const std::string& name,
                         const std::string& program,
                         const std::string& graduation_date,
                         const std::string& gpa) {
  auto proof =
      cert::make_issuer_proof(auth.sender, name, program, graduation_date, gpa);
  auto id = cert::issue_certificate(ledger, auth, name, program,
                                    graduation_date, gpa, proof);

  ordered_json header;
  header["alg"] = "EdDSA";
  header["typ"] = "vc+jwt";
  header["kid"] = token_key.key_id;

  ordered_json payload;
  payload["certificate_id"] = id;
  payload["name"] = name;
  payload["program"] = program;
  payload["graduation_date"] = graduation_date;
  payload["gpa"] = gpa;
  payload["ledger_profile"] = profile_name(ledger);
  payload["issuer_id"] = issuer_id;

  return BridgedCertificate{
      id, jose::compact_sign(header, payload, token_key.private_key)};
}

BridgeReport verify(const ledger::Ledger& ledger, const std::string& jwt,
                    const crypto::PublicKey& token_key) {
  BridgeReport report;

  jose::DecodedJws jws;
  try {
    jws = jose::decode(jwt);
  } catch (const Error&) {
    report.reasons.push_back("jwt malformed");
    return report;
  }
  auto alg = string_claim(jws.header, "alg");
  auto typ = string_claim(jws.header, "typ");
  auto payload = extract(jws.payload);
  if (!alg || *alg != "EdDSA" || !typ || *typ != "vc+jwt" || !payload) {
    report.reasons.push_back("jwt malformed");
    return report;
  }

  if (!jose::verify_signature(jws, token_key))
    report.reasons.push_back("jwt signature invalid");

  // Route two: the anchored record. The payload must reproduce it exactly.
  bool matches = false;
  try {
    auto record = cert::get_certificate(ledger, payload->certificate_id);
    matches = record.name == payload->name &&
              record.program == payload->program &&
              record.graduation_date == payload->graduation_date &&
              record.gpa == payload->gpa &&
              profile_name(ledger) == payload->ledger_profile;
  } catch (const Error& e) {
    if (e.code() != errc::unknown_certificate) throw;
  }
  if (!matches) report.reasons.push_back("payload mismatch");

  auto outcome = cert::verify_certificate(ledger, payload->certificate_id,
                                          payload->name, payload->program,
                                          payload->graduation_date,
                                          payload->gpa);
  if (!outcome.valid) report.reasons.push_back(outcome.reason);

  report.valid = report.reasons.empty();
  return report;
}

}  // namespace triauth::bridge
