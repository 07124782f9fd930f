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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "triauth/crypto.hpp"

namespace triauth::crypto {

// Named key collection backed by a JSON file: a map from key_id to
// {public_key, private_key, alg}. key_ids are unique; the file layout is a
// bare object so generic JSON tooling can inspect it.
class Keystore {
 public:
  Keystore() = default;

  // Throws duplicate_key_id when the id is already present.
  void put(const KeyPair& pair);

  // Throws unknown_key_id.
  const KeyPair& get(std::string_view key_id) const;

  bool contains(std::string_view key_id) const;
  std::size_t size() const { return keys_.size(); }
  std::vector<std::string> key_ids() const;

  std::string to_json() const;
  // Throws corrupt_workspace on any schema violation.
  static Keystore from_json(std::string_view text);

  void save(const std::filesystem::path& path) const;
  static Keystore load(const std::filesystem::path& path);

 private:
  std::map<std::string, KeyPair, std::less<>> keys_;
};

}  // namespace triauth::crypto
