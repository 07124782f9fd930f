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

#include "workspace.hpp"

#include <ctime>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "triauth/error.hpp"

namespace triauth::tool {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw Error(errc::corrupt_workspace, path.string());
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.good()) throw Error(errc::corrupt_workspace, path.string());
}

}  // namespace

Workspace::Workspace(std::filesystem::path root,
                     std::optional<std::string> seed,
                     std::optional<std::int64_t> now)
    : root_(std::move(root)),
      rng_(seed ? crypto::Rng::seeded_from_string(*seed)
                : crypto::Rng::system()),
      now_(now) {
  std::filesystem::create_directories(root_);
}

std::int64_t Workspace::now() const {
  if (now_) return *now_;
  return static_cast<std::int64_t>(std::time(nullptr));
}

std::filesystem::path Workspace::keystore_path() const {
  return root_ / "keystore.json";
}
std::filesystem::path Workspace::registry_path() const {
  return root_ / "registry.json";
}
std::filesystem::path Workspace::journal_path() const {
  return root_ / "ledger.journal";
}
std::filesystem::path Workspace::tokens_path() const {
  return root_ / "tokens.json";
}
std::filesystem::path Workspace::config_path() const {
  return root_ / "config";
}

crypto::Keystore& Workspace::keystore() {
  if (!keystore_) {
    if (std::filesystem::exists(keystore_path()))
      keystore_ = crypto::Keystore::load(keystore_path());
    else
      keystore_ = crypto::Keystore();
  }
  return *keystore_;
}

void Workspace::save_keystore() {
  if (keystore_) keystore_->save(keystore_path());
}

vcred::FileRegistry& Workspace::registry() {
  if (!registry_)
    registry_ = std::make_unique<vcred::FileRegistry>(registry_path());
  return *registry_;
}

void Workspace::load_config() {
  if (config_) return;
  config_.emplace();
  if (!std::filesystem::exists(config_path())) return;
  std::istringstream in(read_file(config_path()));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(errc::corrupt_workspace, "config: expected key=value");
    (*config_)[line.substr(0, eq)] = line.substr(eq + 1);
  }
}

std::string Workspace::config_value(const std::string& key,
                                    const std::string& fallback) {
  load_config();
  auto it = config_->find(key);
  return it == config_->end() ? fallback : it->second;
}

scitokens::TokenIssuer& Workspace::issuer() {
  if (issuer_) return *issuer_;

  auto iss = config_value("issuer", "https://triauth.local");
  auto key_id = config_value("key", "issuer");
  auto access_ttl = std::stoll(config_value("access_ttl", "600"));
  auto refresh_ttl = std::stoll(config_value("refresh_ttl", "2592000"));
  const auto& keys = keystore().get(key_id);
  issuer_ = std::make_unique<scitokens::TokenIssuer>(
      iss, keys, crypto::Rng::seeded(rng_.bytes32()), access_ttl, refresh_ttl);

  if (std::filesystem::exists(tokens_path())) {
    auto doc = ordered_json::parse(read_file(tokens_path()), nullptr, false);
    if (!doc.is_object() || !doc.contains("refresh") || !doc.contains("jti") ||
        !doc["refresh"].is_array() || !doc["jti"].is_array())
      throw Error(errc::corrupt_workspace, tokens_path().string());
    try {
      for (const auto& entry : doc["refresh"]) {
        scitokens::RefreshToken token;
        token.id = entry.at("id").get<std::string>();
        token.sub = entry.at("sub").get<std::string>();
        for (const auto& s : entry.at("scopes"))
          token.scopes.push_back(s.get<std::string>());
        token.issued_at = entry.at("issued_at").get<std::int64_t>();
        token.revoked = entry.at("revoked").get<bool>();
        issuer_->restore_refresh_token(token);
      }
      for (const auto& jti : doc["jti"])
        issuer_->restore_jti(jti.get<std::string>());
    } catch (const ordered_json::exception&) {
      throw Error(errc::corrupt_workspace, tokens_path().string());
    }
  }
  return *issuer_;
}

void Workspace::save_issuer() {
  if (!issuer_) return;
  ordered_json doc;
  ordered_json refresh = ordered_json::array();
  for (const auto& token : issuer_->refresh_tokens()) {
    ordered_json entry;
    entry["id"] = token.id;
    entry["sub"] = token.sub;
    entry["scopes"] = token.scopes;
    entry["issued_at"] = token.issued_at;
    entry["revoked"] = token.revoked;
    refresh.push_back(std::move(entry));
  }
  doc["refresh"] = std::move(refresh);
  doc["jti"] = issuer_->issued_jti();
  write_file(tokens_path(), doc.dump(2) + "\n");
}

bool Workspace::has_ledger() const {
  return std::filesystem::exists(journal_path());
}

ledger::Ledger& Workspace::ledger() {
  if (ledger_) return *ledger_;
  if (has_ledger()) {
    // `ledger replay` reports a broken journal as a negative verification;
    // every other command treats it as a corrupt workspace.
    try {
      auto [profile, blocks] = ledger::Journal::read(journal_path());
      ledger_ = ledger::Ledger::replay(profile, blocks);
    } catch (const Error& e) {
      if (e.code() == errc::broken_chain)
        throw Error(errc::corrupt_workspace, e.what());
      throw;
    }
  } else {
    std::vector<crypto::PublicKey> accounts;
    for (const auto& id : keystore().key_ids())
      accounts.push_back(keystore().get(id).public_key);
    ledger_ =
        ledger::Ledger::init(ledger::LedgerProfile::permissionless(accounts));
    ledger::Journal::write(journal_path(), *ledger_);
  }
  synced_height_ = ledger_->height();
  return *ledger_;
}

void Workspace::reset_ledger(ledger::Ledger fresh) {
  ledger_ = std::move(fresh);
  ledger::Journal::write(journal_path(), *ledger_);
  synced_height_ = ledger_->height();
}

void Workspace::sync_ledger() {
  if (!ledger_) return;
  const auto& chain = ledger_->chain();
  for (auto h = synced_height_ + 1; h < chain.size(); ++h)
    ledger::Journal::append_block(journal_path(), chain[h]);
  synced_height_ = ledger_->height();
}

}  // namespace triauth::tool
