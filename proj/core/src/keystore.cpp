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

#include "triauth/keystore.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "triauth/error.hpp"

namespace triauth::crypto {

void Keystore::put(const KeyPair& pair) {
  auto [it, inserted] = keys_.emplace(pair.key_id, pair);
  (void)it;
  if (!inserted) {
    throw Error(errc::duplicate_key_id, "keystore: id '" + pair.key_id +
                                            "' already present");
  }
}

const KeyPair& Keystore::get(std::string_view key_id) const {
  auto it = keys_.find(key_id);
  if (it == keys_.end()) {
    throw Error(errc::unknown_key_id,
                "keystore: no key '" + std::string(key_id) + "'");
  }
  return it->second;
}

bool Keystore::contains(std::string_view key_id) const {
  return keys_.find(key_id) != keys_.end();
}

std::vector<std::string> Keystore::key_ids() const {
  std::vector<std::string> ids;
  ids.reserve(keys_.size());
  for (const auto& [id, pair] : keys_) ids.push_back(id);
  return ids;
}

std::string Keystore::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [id, pair] : keys_) {
    doc[id] = {{"public_key", pair.public_key.to_b64url()},
               {"private_key", pair.private_key.to_b64url()},
               {"alg", "Ed25519"}};
  }
  return doc.dump(2);
}

Keystore Keystore::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw Error(errc::corrupt_workspace, "keystore: not valid JSON");
  }
  if (!doc.is_object()) {
    throw Error(errc::corrupt_workspace, "keystore: top level must be a map");
  }

  Keystore store;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& entry = it.value();
    if (!entry.is_object() || !entry.contains("public_key") ||
        !entry.contains("private_key") || !entry.contains("alg") ||
        !entry["public_key"].is_string() || !entry["private_key"].is_string() ||
        entry["alg"] != "Ed25519") {
      throw Error(errc::corrupt_workspace,
                  "keystore: malformed entry '" + it.key() + "'");
    }
    KeyPair pair;
    pair.key_id = it.key();
    try {
      pair.public_key =
          PublicKey::from_b64url(entry["public_key"].get<std::string>());
      pair.private_key =
          PrivateKey::from_b64url(entry["private_key"].get<std::string>());
    } catch (const Error&) {
      throw Error(errc::corrupt_workspace,
                  "keystore: bad key bytes in entry '" + it.key() + "'");
    }
    store.keys_.emplace(pair.key_id, std::move(pair));
  }
  return store;
}

void Keystore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(errc::corrupt_workspace,
                "keystore: cannot write " + path.string());
  }
  out << to_json() << '\n';
}

Keystore Keystore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(errc::corrupt_workspace,
                "keystore: cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace triauth::crypto
