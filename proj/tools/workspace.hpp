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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "triauth/crypto.hpp"
#include "triauth/keystore.hpp"
#include "triauth/ledger.hpp"
#include "triauth/scitokens.hpp"
#include "triauth/vcred.hpp"

namespace triauth::tool {

// One directory holding all persistent state: keystore.json, registry.json,
// ledger.journal, tokens.json and a key=value config file. Every file is
// created on first use; loading an existing file that fails its schema is a
// corrupt workspace.
class Workspace {
 public:
  Workspace(std::filesystem::path root, std::optional<std::string> seed,
            std::optional<std::int64_t> now);

  const std::filesystem::path& root() const { return root_; }

  std::int64_t now() const;
  crypto::Rng& rng() { return rng_; }

  crypto::Keystore& keystore();
  void save_keystore();

  vcred::FileRegistry& registry();

  // Config keys: issuer (token issuer URI), key (signing key id in the
  // keystore), access_ttl, refresh_ttl.
  std::string config_value(const std::string& key,
                           const std::string& fallback);

  // Token issuer state is rebuilt from config + keystore + tokens.json.
  scitokens::TokenIssuer& issuer();
  void save_issuer();

  bool has_ledger() const;
  // Loads ledger.journal, replaying it from genesis. When the journal does
  // not exist yet, initializes a permissionless ledger whose accounts are
  // every key currently in the keystore.
  ledger::Ledger& ledger();
  // Rewrites the journal from scratch (ledger init).
  void reset_ledger(ledger::Ledger fresh);
  // Appends blocks the in-memory ledger gained since the last sync. The
  // journal is append-only; committed history is never rewritten.
  void sync_ledger();

  std::filesystem::path keystore_path() const;
  std::filesystem::path registry_path() const;
  std::filesystem::path journal_path() const;
  std::filesystem::path tokens_path() const;
  std::filesystem::path config_path() const;

 private:
  void load_config();

  std::filesystem::path root_;
  crypto::Rng rng_;
  std::optional<std::int64_t> now_;

  std::optional<crypto::Keystore> keystore_;
  std::unique_ptr<vcred::FileRegistry> registry_;
  std::optional<std::map<std::string, std::string>> config_;
  std::unique_ptr<scitokens::TokenIssuer> issuer_;
  std::optional<ledger::Ledger> ledger_;
  std::uint64_t synced_height_ = 0;
};

}  // namespace triauth::tool
