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

#include "triauth/jose.hpp"

#include "triauth/encoding.hpp"
#include "triauth/error.hpp"

namespace triauth::jose {

namespace {

nlohmann::ordered_json parse_object(const std::vector<std::uint8_t>& bytes,
                                    const char* what) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception&) {
    throw Error(errc::malformed_token, std::string(what) + " is not JSON");
  }
  if (!doc.is_object()) {
    throw Error(errc::malformed_token,
                std::string(what) + " is not a JSON object");
  }
  return doc;
}

}  // namespace

std::string compact_sign(const nlohmann::ordered_json& header,
                         const nlohmann::ordered_json& payload,
                         const crypto::PrivateKey& key) {
  std::string signing_input =
      b64url_encode(header.dump()) + "." + b64url_encode(payload.dump());
  crypto::Signature sig = crypto::sign(key, signing_input);
  return signing_input + "." + b64url_encode(sig.bytes);
}

DecodedJws decode(const std::string& compact) {
  auto first = compact.find('.');
  auto second = compact.find('.', first == std::string::npos ? 0 : first + 1);
  if (first == std::string::npos || second == std::string::npos ||
      compact.find('.', second + 1) != std::string::npos) {
    throw Error(errc::malformed_token, "expected three dot-separated segments");
  }

  DecodedJws jws;
  jws.header_b64 = compact.substr(0, first);
  jws.payload_b64 = compact.substr(first + 1, second - first - 1);
  std::string sig_b64 = compact.substr(second + 1);
  if (jws.header_b64.empty() || jws.payload_b64.empty() || sig_b64.empty()) {
    throw Error(errc::malformed_token, "empty segment");
  }

  std::vector<std::uint8_t> header_bytes, payload_bytes;
  try {
    header_bytes = b64url_decode(jws.header_b64);
    payload_bytes = b64url_decode(jws.payload_b64);
    jws.signature = crypto::Signature::from_b64url(sig_b64);
  } catch (const Error&) {
    throw Error(errc::malformed_token, "segment is not valid base64url");
  }

  jws.header = parse_object(header_bytes, "header");
  jws.payload = parse_object(payload_bytes, "payload");
  jws.signing_input = jws.header_b64 + "." + jws.payload_b64;
  return jws;
}

bool verify_signature(const DecodedJws& jws, const crypto::PublicKey& key) {
  return crypto::verify(key, jws.signing_input, jws.signature);
}

}  // namespace triauth::jose
