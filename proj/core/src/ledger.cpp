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

#include "triauth/ledger.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "triauth/encoding.hpp"
#include "triauth/error.hpp"

namespace triauth::ledger {

namespace {

const crypto::Digest kZeroDigest{};

std::string dec(std::uint64_t v) { return std::to_string(v); }

const Peer* find_peer(const LedgerProfile& profile, const std::string& id) {
  for (const auto& p : profile.peers) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const Peer* find_peer_by_key(const LedgerProfile& profile,
                             const crypto::PublicKey& key) {
  for (const auto& p : profile.peers) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

bool is_system_tx(const Transaction& tx) {
  return tx.contract == kSystemContract;
}

nlohmann::ordered_json channel_config_json(const ChannelConfig& config) {
  nlohmann::ordered_json doc;
  doc["members"] = config.members;
  doc["threshold"] = config.policy.threshold;
  doc["peers"] = config.policy.peers;
  return doc;
}

ChannelConfig parse_channel_config(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  ChannelConfig config;
  config.members = doc["members"].get<std::vector<std::string>>();
  config.policy.threshold = doc["threshold"].get<std::size_t>();
  config.policy.peers = doc["peers"].get<std::vector<std::string>>();
  return config;
}

// create_channel args: [channel_id, M, member..., threshold, K, peer...].
struct ChannelArgs {
  std::string channel_id;
  ChannelConfig config;
};

std::optional<ChannelArgs> parse_channel_args(
    const std::vector<std::string>& args) {
  auto parse_count = [](const std::string& s) -> std::optional<std::size_t> {
    if (s.empty() || s.size() > 9 ||
        !std::all_of(s.begin(), s.end(), [](char c) {
          return c >= '0' && c <= '9';
        })) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoul(s));
  };

  std::size_t i = 0;
  auto next = [&]() -> const std::string* {
    return i < args.size() ? &args[i++] : nullptr;
  };

  ChannelArgs out;
  const std::string* p = next();
  if (!p) return std::nullopt;
  out.channel_id = *p;

  p = next();
  auto m = p ? parse_count(*p) : std::nullopt;
  if (!m) return std::nullopt;
  for (std::size_t k = 0; k < *m; ++k) {
    p = next();
    if (!p) return std::nullopt;
    out.config.members.push_back(*p);
  }

  p = next();
  auto threshold = p ? parse_count(*p) : std::nullopt;
  if (!threshold) return std::nullopt;
  out.config.policy.threshold = *threshold;

  p = next();
  auto n = p ? parse_count(*p) : std::nullopt;
  if (!n) return std::nullopt;
  for (std::size_t k = 0; k < *n; ++k) {
    p = next();
    if (!p) return std::nullopt;
    out.config.policy.peers.push_back(*p);
  }
  return i == args.size() ? std::optional(out) : std::nullopt;
}

std::vector<std::string> channel_args(const std::string& channel_id,
                                      const std::vector<std::string>& members,
                                      const EndorsementPolicy& policy) {
  std::vector<std::string> args;
  args.push_back(channel_id);
  args.push_back(dec(members.size()));
  args.insert(args.end(), members.begin(), members.end());
  args.push_back(dec(policy.threshold));
  args.push_back(dec(policy.peers.size()));
  args.insert(args.end(), policy.peers.begin(), policy.peers.end());
  return args;
}

template <typename T>
bool has_duplicates(const std::vector<T>& values) {
  std::set<T> seen(values.begin(), values.end());
  return seen.size() != values.size();
}

// The system contract records channel configurations as replayable history.
std::string system_contract(ContractContext& ctx, const std::string& method,
                            const std::vector<std::string>& args) {
  if (method != "create_channel") {
    throw Error(errc::bad_transaction, "system: unknown method " + method);
  }
  if (ctx.profile_kind() != ProfileKind::permissioned) {
    throw Error(errc::not_permissioned);
  }
  auto parsed = parse_channel_args(args);
  if (!parsed) {
    throw Error(errc::bad_transaction, "system: malformed channel args");
  }
  const auto& id = parsed->channel_id;
  const auto& config = parsed->config;

  if (id.empty() || id == kSystemChannel) {
    throw Error(errc::bad_policy, "reserved or empty channel id");
  }
  if (ctx.get("channel/" + id)) {
    throw Error(errc::duplicate_channel, "channel '" + id + "' exists");
  }
  if (config.members.empty() || has_duplicates(config.members)) {
    throw Error(errc::bad_policy, "members must be nonempty and unique");
  }
  if (config.policy.peers.empty() || has_duplicates(config.policy.peers)) {
    throw Error(errc::bad_policy, "policy peers must be nonempty and unique");
  }
  if (config.policy.threshold < 1 ||
      config.policy.threshold > config.policy.peers.size()) {
    throw Error(errc::bad_policy, "threshold must be in [1, peer count]");
  }
  for (const auto& peer : config.members) {
    if (!find_peer(ctx.profile(), peer)) {
      throw Error(errc::unknown_peer, "member '" + peer + "' unknown");
    }
  }
  for (const auto& peer : config.policy.peers) {
    if (!find_peer(ctx.profile(), peer)) {
      throw Error(errc::unknown_peer, "policy peer '" + peer + "' unknown");
    }
  }
  ctx.put("channel/" + id, channel_config_json(config).dump());
  return id;
}

}  // namespace

std::vector<std::uint8_t> Transaction::body() const {
  crypto::CanonicalRecord record;
  record.add("sender", sender.to_b64url());
  record.add("channel", channel);
  record.add("contract", contract);
  record.add("method", method);
  for (std::size_t i = 0; i < args.size(); ++i) {
    record.add("arg" + dec(i), args[i]);
  }
  return crypto::canonical_encode(record);
}

crypto::Digest Transaction::envelope_digest() const {
  crypto::CanonicalRecord record;
  record.add("tx", tx_id.to_b64url());
  record.add("sig", sender_signature.to_b64url());
  for (std::size_t i = 0; i < endorsements.size(); ++i) {
    record.add("peer" + dec(i), endorsements[i].peer_id);
    record.add("esig" + dec(i), endorsements[i].signature.to_b64url());
  }
  return crypto::sha256(crypto::canonical_encode(record));
}

Transaction make_transaction(const crypto::KeyPair& sender,
                             std::string channel, std::string contract,
                             std::string method,
                             std::vector<std::string> args) {
  Transaction tx;
  tx.sender = sender.public_key;
  tx.channel = std::move(channel);
  tx.contract = std::move(contract);
  tx.method = std::move(method);
  tx.args = std::move(args);
  auto body = tx.body();
  tx.tx_id = crypto::sha256(body);
  tx.sender_signature = crypto::sign(sender.private_key, body);
  return tx;
}

crypto::Digest Block::compute_hash(std::uint64_t height,
                                   const crypto::Digest& prev_hash,
                                   const std::vector<Transaction>& txs) {
  crypto::CanonicalRecord record;
  record.add("height", dec(height));
  record.add("prev", prev_hash.to_b64url());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    record.add("tx" + dec(i), txs[i].envelope_digest().to_b64url());
  }
  return crypto::sha256(crypto::canonical_encode(record));
}

std::string_view profile_kind_name(ProfileKind kind) noexcept {
  return kind == ProfileKind::permissionless ? "permissionless"
                                             : "permissioned";
}

LedgerProfile LedgerProfile::permissionless(
    std::vector<crypto::PublicKey> accounts) {
  LedgerProfile profile;
  profile.kind = ProfileKind::permissionless;
  profile.accounts = std::move(accounts);
  return profile;
}

LedgerProfile LedgerProfile::permissioned(std::vector<Peer> peers) {
  LedgerProfile profile;
  profile.kind = ProfileKind::permissioned;
  profile.peers = std::move(peers);
  return profile;
}

Ledger Ledger::init(LedgerProfile profile) {
  if (profile.kind == ProfileKind::permissionless) {
    if (has_duplicates(std::vector<std::string>([&] {
          std::vector<std::string> keys;
          for (const auto& a : profile.accounts) keys.push_back(a.to_b64url());
          return keys;
        }()))) {
      throw Error(errc::bad_policy, "duplicate account keys");
    }
    if (!profile.peers.empty()) {
      throw Error(errc::bad_policy, "permissionless profile lists peers");
    }
  } else {
    if (profile.peers.empty()) {
      throw Error(errc::bad_policy, "permissioned profile needs peers");
    }
    std::set<std::string> ids;
    for (const auto& p : profile.peers) {
      if (p.id.empty() || p.key.is_zero() || !ids.insert(p.id).second) {
        throw Error(errc::bad_policy, "peer ids must be unique and nonempty "
                                      "with real keys");
      }
    }
    if (!profile.accounts.empty()) {
      throw Error(errc::bad_policy, "permissioned profile lists accounts");
    }
  }

  Ledger ledger;
  ledger.profile_ = std::move(profile);
  Block genesis;
  genesis.height = 0;
  genesis.prev_hash = kZeroDigest;
  genesis.block_hash = Block::compute_hash(0, kZeroDigest, {});
  ledger.chain_.push_back(std::move(genesis));
  return ledger;
}

void Ledger::create_channel(const std::string& channel_id,
                            const std::vector<std::string>& members,
                            const EndorsementPolicy& policy) {
  Transaction tx;
  tx.channel = kSystemChannel;
  tx.contract = kSystemContract;
  tx.method = "create_channel";
  tx.args = channel_args(channel_id, members, policy);
  tx.tx_id = crypto::sha256(tx.body());

  Receipt receipt = submit(tx);
  if (!receipt.accepted) {
    if (auto code = errc_from_name(receipt.reason)) {
      throw Error(*code, "create_channel: " + receipt.reason);
    }
    throw Error(errc::bad_transaction, "create_channel: " + receipt.reason);
  }
}

Receipt Ledger::submit(const Transaction& tx) {
  std::map<std::string, std::string> staged;
  std::string result;
  Receipt receipt = validate_and_execute(tx, &staged, &result);
  if (!receipt.accepted) return receipt;

  apply(tx, staged);
  receipt.block_height = chain_.back().height;
  receipt.result = result;
  return receipt;
}

Receipt Ledger::validate_and_execute(
    const Transaction& tx, std::map<std::string, std::string>* staged,
    std::string* result) const {
  auto reject = [](std::string reason) {
    Receipt r;
    r.accepted = false;
    r.reason = std::move(reason);
    return r;
  };

  ContractFn fn = find_contract(tx.contract);
  if (!fn) return reject("unknown contract");

  if (tx.tx_id != crypto::sha256(tx.body())) return reject("tx_id mismatch");

  if (is_system_tx(tx)) {
    if (tx.channel != kSystemChannel || !tx.sender.is_zero() ||
        !tx.sender_signature.is_zero() || !tx.endorsements.empty()) {
      return reject("bad transaction");
    }
  } else {
    if (tx.channel == kSystemChannel) return reject("bad transaction");

    if (profile_.kind == ProfileKind::permissionless) {
      if (tx.channel != kDefaultChannel) return reject("unknown channel");
      if (!tx.endorsements.empty()) return reject("bad transaction");
      bool known = std::any_of(profile_.accounts.begin(),
                               profile_.accounts.end(),
                               [&](const auto& a) { return a == tx.sender; });
      if (!known) return reject("unknown account");
      if (!crypto::verify(tx.sender, tx.body(), tx.sender_signature)) {
        return reject("bad sender signature");
      }
    } else {
      auto config = channel_config(tx.channel);
      if (!config) return reject("unknown channel");
      const Peer* sender_peer = find_peer_by_key(profile_, tx.sender);
      if (!sender_peer) return reject("unknown account");
      if (std::find(config->members.begin(), config->members.end(),
                    sender_peer->id) == config->members.end()) {
        return reject("sender not a channel member");
      }
      if (!crypto::verify(tx.sender, tx.body(), tx.sender_signature)) {
        return reject("bad sender signature");
      }

      std::set<std::string> endorsers;
      for (const auto& e : tx.endorsements) {
        const Peer* peer = find_peer(profile_, e.peer_id);
        if (!peer) return reject("unknown endorsing peer");
        if (std::find(config->policy.peers.begin(),
                      config->policy.peers.end(),
                      e.peer_id) == config->policy.peers.end()) {
          return reject("endorser not in policy");
        }
        if (!crypto::verify(peer->key, tx.body(), e.signature)) {
          return reject("invalid endorsement signature");
        }
        endorsers.insert(e.peer_id);
      }
      if (endorsers.size() < config->policy.threshold) {
        return reject("insufficient endorsements");
      }
    }
  }

  ContractContext ctx(*this, tx, /*read_only=*/false, staged);
  try {
    *result = fn(ctx, tx.method, tx.args);
  } catch (const Error& e) {
    return reject(std::string(e.name()));
  } catch (const std::exception&) {
    return reject("bad transaction");
  }

  Receipt receipt;
  receipt.accepted = true;
  return receipt;
}

void Ledger::apply(const Transaction& tx,
                   const std::map<std::string, std::string>& staged) {
  for (const auto& [key, value] : staged) {
    state_[StateKey(tx.channel, tx.contract, key)] = value;
  }
  Block block;
  block.height = chain_.back().height + 1;
  block.prev_hash = chain_.back().block_hash;
  block.txs.push_back(tx);
  block.block_hash = Block::compute_hash(block.height, block.prev_hash,
                                         block.txs);
  chain_.push_back(std::move(block));
}

QueryResult Ledger::query(const std::string& channel,
                          const std::string& contract,
                          const std::string& method,
                          const std::vector<std::string>& args) const {
  ContractFn fn = find_contract(contract);
  if (!fn) throw Error(errc::unknown_contract, "no contract " + contract);
  if (profile_.kind == ProfileKind::permissionless) {
    if (channel != kDefaultChannel) {
      throw Error(errc::unknown_channel, "no channel " + channel);
    }
  } else if (!channel_config(channel)) {
    throw Error(errc::unknown_channel, "no channel " + channel);
  }

  Transaction tx;
  tx.channel = channel;
  tx.contract = contract;
  tx.method = method;
  tx.args = args;
  ContractContext ctx(*this, tx, /*read_only=*/true, nullptr);
  return QueryResult{fn(ctx, method, args)};
}

std::optional<std::string> Ledger::read_state(
    const std::string& channel, const std::string& contract,
    const std::string& key, const std::optional<std::string>& reader) const {
  if (channel != kSystemChannel &&
      profile_.kind == ProfileKind::permissioned) {
    auto config = channel_config(channel);
    if (!config) throw Error(errc::unknown_channel, "no channel " + channel);
    if (!reader || std::find(config->members.begin(), config->members.end(),
                             *reader) == config->members.end()) {
      throw Error(errc::access_denied,
                  "reader is not a member of channel " + channel);
    }
  } else if (channel != kSystemChannel && channel != kDefaultChannel) {
    throw Error(errc::unknown_channel, "no channel " + channel);
  }

  auto it = state_.find(StateKey(channel, contract, key));
  if (it == state_.end()) return std::nullopt;
  return it->second;
}

crypto::Digest Ledger::state_root() const {
  std::vector<crypto::Digest> entries;
  entries.reserve(state_.size());
  for (const auto& [key, value] : state_) {
    crypto::CanonicalRecord record;
    record.add("channel", std::get<0>(key));
    record.add("contract", std::get<1>(key));
    record.add("key", std::get<2>(key));
    record.add("value", value);
    entries.push_back(crypto::sha256(crypto::canonical_encode(record)));
  }
  std::sort(entries.begin(), entries.end());
  std::vector<std::uint8_t> concat;
  concat.reserve(entries.size() * 32);
  for (const auto& d : entries) {
    concat.insert(concat.end(), d.bytes.begin(), d.bytes.end());
  }
  return crypto::sha256(concat);
}

std::optional<ChannelConfig> Ledger::channel_config(
    const std::string& channel_id) const {
  auto it = state_.find(StateKey(std::string(kSystemChannel),
                                 std::string(kSystemContract),
                                 "channel/" + channel_id));
  if (it == state_.end()) return std::nullopt;
  return parse_channel_config(it->second);
}

std::vector<std::string> Ledger::channel_ids() const {
  std::vector<std::string> ids;
  for (const auto& [key, value] : state_) {
    if (std::get<0>(key) == kSystemChannel &&
        std::get<1>(key) == kSystemContract &&
        std::get<2>(key).rfind("channel/", 0) == 0) {
      ids.push_back(std::get<2>(key).substr(8));
    }
  }
  return ids;
}

Ledger Ledger::replay(const LedgerProfile& profile,
                      const std::vector<Block>& chain) {
  Ledger ledger = Ledger::init(profile);
  if (chain.empty()) {
    throw Error(errc::broken_chain, "empty chain");
  }
  const Block& genesis = chain.front();
  if (genesis.height != 0 || genesis.prev_hash != kZeroDigest ||
      !genesis.txs.empty() ||
      genesis.block_hash != Block::compute_hash(0, kZeroDigest, {})) {
    throw Error(errc::broken_chain, "bad genesis block");
  }

  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Block& block = chain[i];
    const Block& prev = ledger.chain_.back();
    if (block.height != prev.height + 1) {
      throw Error(errc::broken_chain,
                  "height discontinuity at " + dec(block.height));
    }
    if (block.prev_hash != prev.block_hash) {
      throw Error(errc::broken_chain,
                  "prev_hash mismatch at height " + dec(block.height));
    }
    if (block.txs.size() != 1) {
      throw Error(errc::broken_chain,
                  "block at height " + dec(block.height) +
                      " must carry exactly one transaction");
    }
    if (block.block_hash !=
        Block::compute_hash(block.height, block.prev_hash, block.txs)) {
      throw Error(errc::broken_chain,
                  "block hash mismatch at height " + dec(block.height));
    }

    std::map<std::string, std::string> staged;
    std::string result;
    Receipt receipt =
        ledger.validate_and_execute(block.txs[0], &staged, &result);
    if (!receipt.accepted) {
      throw Error(errc::broken_chain, "invalid transaction at height " +
                                          dec(block.height) + ": " +
                                          receipt.reason);
    }
    ledger.apply(block.txs[0], staged);
  }
  return ledger;
}

Endorsement endorse(const Ledger& ledger, const std::string& channel_id,
                    const std::string& peer_id,
                    const crypto::PrivateKey& peer_key,
                    const Transaction& tx) {
  auto config = ledger.channel_config(channel_id);
  if (!config) {
    throw Error(errc::unknown_channel, "no channel " + channel_id);
  }
  if (!find_peer(ledger.profile(), peer_id)) {
    throw Error(errc::unknown_peer, "peer '" + peer_id + "' unknown");
  }
  if (std::find(config->policy.peers.begin(), config->policy.peers.end(),
                peer_id) == config->policy.peers.end()) {
    throw Error(errc::not_in_policy,
                "peer '" + peer_id + "' not in the endorsement policy");
  }
  Endorsement e;
  e.peer_id = peer_id;
  e.signature = crypto::sign(peer_key, tx.body());
  return e;
}

Receipt submit_as(Ledger& ledger, const TxAuth& auth,
                  const std::string& contract, const std::string& method,
                  std::vector<std::string> args) {
  Transaction tx = make_transaction(auth.sender, auth.channel, contract,
                                    method, std::move(args));
  for (const auto& [peer_id, key] : auth.endorsers) {
    tx.endorsements.push_back(endorse(ledger, auth.channel, peer_id, key, tx));
  }
  return ledger.submit(tx);
}

ContractContext::ContractContext(const Ledger& ledger, const Transaction& tx,
                                 bool read_only,
                                 std::map<std::string, std::string>* staged)
    : ledger_(&ledger), tx_(&tx), read_only_(read_only), staged_(staged) {}

std::optional<std::string> ContractContext::get(const std::string& key) const {
  if (staged_) {
    auto it = staged_->find(key);
    if (it != staged_->end()) return it->second;
  }
  auto it = ledger_->state_.find(
      Ledger::StateKey(tx_->channel, tx_->contract, key));
  if (it == ledger_->state_.end()) return std::nullopt;
  return it->second;
}

void ContractContext::put(const std::string& key, const std::string& value) {
  if (read_only_ || !staged_) {
    throw Error(errc::read_only_context,
                "contract wrote state inside a query");
  }
  (*staged_)[key] = value;
}

namespace {

nlohmann::ordered_json tx_json(const Transaction& tx) {
  nlohmann::ordered_json doc;
  doc["id"] = tx.tx_id.to_b64url();
  doc["sender"] = tx.sender.to_b64url();
  doc["channel"] = tx.channel;
  doc["contract"] = tx.contract;
  doc["method"] = tx.method;
  doc["args"] = tx.args;
  doc["sig"] = tx.sender_signature.to_b64url();
  auto endorsements = nlohmann::ordered_json::array();
  for (const auto& e : tx.endorsements) {
    endorsements.push_back(
        {{"peer", e.peer_id}, {"sig", e.signature.to_b64url()}});
  }
  doc["endorsements"] = std::move(endorsements);
  return doc;
}

Transaction tx_from_json(const nlohmann::json& doc) {
  Transaction tx;
  tx.tx_id = crypto::Digest::from_b64url(doc.at("id").get<std::string>());
  tx.sender =
      crypto::PublicKey::from_b64url(doc.at("sender").get<std::string>());
  tx.channel = doc.at("channel").get<std::string>();
  tx.contract = doc.at("contract").get<std::string>();
  tx.method = doc.at("method").get<std::string>();
  tx.args = doc.at("args").get<std::vector<std::string>>();
  tx.sender_signature =
      crypto::Signature::from_b64url(doc.at("sig").get<std::string>());
  for (const auto& e : doc.at("endorsements")) {
    Endorsement endorsement;
    endorsement.peer_id = e.at("peer").get<std::string>();
    endorsement.signature =
        crypto::Signature::from_b64url(e.at("sig").get<std::string>());
    tx.endorsements.push_back(std::move(endorsement));
  }
  return tx;
}

Block block_from_json(const nlohmann::json& doc) {
  Block block;
  block.height = doc.at("height").get<std::uint64_t>();
  block.prev_hash =
      crypto::Digest::from_b64url(doc.at("prev").get<std::string>());
  block.block_hash =
      crypto::Digest::from_b64url(doc.at("hash").get<std::string>());
  for (const auto& t : doc.at("txs")) {
    block.txs.push_back(tx_from_json(t));
  }
  return block;
}

LedgerProfile profile_from_json(const nlohmann::json& doc) {
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "permissionless") {
    std::vector<crypto::PublicKey> accounts;
    for (const auto& a : doc.at("accounts")) {
      accounts.push_back(crypto::PublicKey::from_b64url(a.get<std::string>()));
    }
    return LedgerProfile::permissionless(std::move(accounts));
  }
  if (kind == "permissioned") {
    std::vector<Peer> peers;
    for (const auto& p : doc.at("peers")) {
      Peer peer;
      peer.id = p.at("id").get<std::string>();
      peer.key = crypto::PublicKey::from_b64url(p.at("key").get<std::string>());
      peers.push_back(std::move(peer));
    }
    return LedgerProfile::permissioned(std::move(peers));
  }
  throw Error(errc::broken_chain, "journal: unknown profile kind");
}

}  // namespace

std::string Journal::profile_json(const LedgerProfile& profile) {
  nlohmann::ordered_json doc;
  doc["kind"] = std::string(profile_kind_name(profile.kind));
  if (profile.kind == ProfileKind::permissionless) {
    auto accounts = nlohmann::ordered_json::array();
    for (const auto& a : profile.accounts) accounts.push_back(a.to_b64url());
    doc["accounts"] = std::move(accounts);
  } else {
    auto peers = nlohmann::ordered_json::array();
    for (const auto& p : profile.peers) {
      peers.push_back({{"id", p.id}, {"key", p.key.to_b64url()}});
    }
    doc["peers"] = std::move(peers);
  }
  return doc.dump();
}

std::string Journal::block_json(const Block& block) {
  nlohmann::ordered_json doc;
  doc["height"] = block.height;
  doc["prev"] = block.prev_hash.to_b64url();
  doc["hash"] = block.block_hash.to_b64url();
  auto txs = nlohmann::ordered_json::array();
  for (const auto& tx : block.txs) txs.push_back(tx_json(tx));
  doc["txs"] = std::move(txs);
  return doc.dump();
}

void Journal::write(const std::filesystem::path& path, const Ledger& ledger) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    throw Error(errc::broken_chain, "journal: cannot write " + path.string());
  }
  nlohmann::ordered_json header;
  header["format"] = "triauth.ledger";
  header["version"] = 1;
  header["profile"] =
      nlohmann::ordered_json::parse(profile_json(ledger.profile()));
  out << header.dump() << '\n';
  for (const auto& block : ledger.chain()) {
    out << block_json(block) << '\n';
  }
}

void Journal::append_block(const std::filesystem::path& path,
                           const Block& block) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) {
    throw Error(errc::broken_chain, "journal: cannot append " + path.string());
  }
  out << block_json(block) << '\n';
}

std::pair<LedgerProfile, std::vector<Block>> Journal::read(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::broken_chain, "journal: cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  std::vector<std::string> complete;
  std::string partial;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) {
      partial = text.substr(start);
      break;
    }
    complete.push_back(text.substr(start, end - start));
    start = end + 1;
  }

  if (complete.empty()) {
    // A journal whose header never finished writing holds no history at all.
    throw Error(errc::broken_chain, "journal: missing header");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(complete.front());
  } catch (const nlohmann::json::exception&) {
    throw Error(errc::broken_chain, "journal: unreadable header");
  }
  if (!header.is_object() || header.value("format", "") != "triauth.ledger" ||
      header.value("version", 0) != 1 || !header.contains("profile")) {
    throw Error(errc::broken_chain, "journal: unsupported header");
  }

  LedgerProfile profile;
  try {
    profile = profile_from_json(header["profile"]);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(errc::broken_chain, "journal: malformed profile");
  }

  std::vector<Block> blocks;
  for (std::size_t i = 1; i < complete.size(); ++i) {
    try {
      blocks.push_back(block_from_json(nlohmann::json::parse(complete[i])));
    } catch (const std::exception&) {
      throw Error(errc::broken_chain,
                  "journal: unreadable block line " + dec(i));
    }
  }

  // An unterminated tail is the footprint of a crash mid-append: keep it only
  // if it parses as a complete block, otherwise recover to the last full one.
  if (!partial.empty()) {
    try {
      blocks.push_back(block_from_json(nlohmann::json::parse(partial)));
    } catch (const std::exception&) {
      // dropped
    }
  }

  return {std::move(profile), std::move(blocks)};
}

ContractFn find_contract(const std::string& contract_id) {
  if (contract_id == kSystemContract) return &system_contract;
  return find_app_contract(contract_id);
}

}  // namespace triauth::ledger
