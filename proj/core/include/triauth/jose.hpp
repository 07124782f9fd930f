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

#include <nlohmann/json.hpp>

#include "triauth/crypto.hpp"

namespace triauth::jose {

// A parsed compact JWS. header/payload preserve the document key order so
// callers can check the emitted order bit-exactly.
struct DecodedJws {
  nlohmann::ordered_json header;
  nlohmann::ordered_json payload;
  std::string header_b64;
  std::string payload_b64;
  std::string signing_input;  // header_b64 "." payload_b64
  crypto::Signature signature;
};

// Serializes header and payload exactly as given (insertion order, compact
// separators), signs the ASCII signing input with Ed25519, and returns the
// three-segment compact form.
std::string compact_sign(const nlohmann::ordered_json& header,
                         const nlohmann::ordered_json& payload,
                         const crypto::PrivateKey& key);

// Splits and strictly decodes a compact JWS. Throws malformed_token for
// anything that is not exactly three valid base64url segments carrying two
// JSON objects and a 64-byte signature.
DecodedJws decode(const std::string& compact);

bool verify_signature(const DecodedJws& jws, const crypto::PublicKey& key);

}  // namespace triauth::jose
