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
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "triauth/crypto.hpp"

namespace triauth::ledger {

// Channel used on the permissionless profile, where no channel concept
// exists at the surface.
inline constexpr std::string_view kDefaultChannel = "main";
// Reserved channel holding system records (channel configurations).
inline constexpr std::string_view kSystemChannel = "_sys";
inline constexpr std::string_view kSystemContract = "_system";

struct Endorsement {
  std::string peer_id;
  crypto::Signature signature;
};

struct Transaction {
  crypto::Digest tx_id;  // hash of body()
  crypto::PublicKey sender;
  std::string channel;
  std::string contract;
  std::string method;
  std::vector<std::string> args;
  crypto::Signature sender_signature;   // over body()
  std::vector<Endorsement> endorsements;

  // Injective byte form covering sender, channel, contract, method and args.
  // Signatures and endorsements sign this; tx_id hashes it.
  std::vector<std::uint8_t> body() const;

  // Digest over tx_id, sender_signature and endorsements. Block hashes cover
  // envelopes, not just bodies, so no stored byte escapes tamper evidence.
  crypto::Digest envelope_digest() const;
};

// Builds a transaction with tx_id and sender_signature filled in.
Transaction make_transaction(const crypto::KeyPair& sender,
                             std::string channel, std::string contract,
                             std::string method,
                             std::vector<std::string> args);

struct Block {
  std::uint64_t height = 0;
  crypto::Digest prev_hash;
  std::vector<Transaction> txs;
  crypto::Digest block_hash;

  static crypto::Digest compute_hash(std::uint64_t height,
                                     const crypto::Digest& prev_hash,
                                     const std::vector<Transaction>& txs);
};

struct Peer {
  std::string id;
  crypto::PublicKey key;
};

struct EndorsementPolicy {
  std::size_t threshold = 0;
  std::vector<std::string> peers;
};

struct ChannelConfig {
  std::vector<std::string> members;
  EndorsementPolicy policy;
};

enum class ProfileKind { permissionless, permissioned };

std::string_view profile_kind_name(ProfileKind kind) noexcept;

struct LedgerProfile {
  ProfileKind kind = ProfileKind::permissionless;
  std::vector<crypto::PublicKey> accounts;  // permissionless senders
  std::vector<Peer> peers;                  // permissioned participants

  static LedgerProfile permissionless(std::vector<crypto::PublicKey> accounts);
  static LedgerProfile permissioned(std::vector<Peer> peers);
};

struct Receipt {
  bool accepted = false;
  std::uint64_t block_height = 0;  // meaningful only when accepted
  std::string reason;              // empty when accepted
  std::string result;              // contract return value when accepted
};

struct QueryResult {
  std::string value;
};

class ContractContext;

// Deterministic single-sequencer ledger. Every accepted transaction becomes
// one block; world state is a (channel, contract, key) -> value map whose
// digest (state_root) witnesses determinism. Replay from the genesis chain
// re-validates everything, so any bit flip in stored history surfaces as
// broken_chain.
class Ledger {
 public:
  // Validates the profile (unique account keys / peer ids). Throws
  // bad_policy on violations.
  static Ledger init(LedgerProfile profile);

  // Permissioned only. Appends a system transaction so the channel is part
  // of replayable history. Throws not_permissioned, unknown_peer,
  // duplicate_channel, bad_policy.
  void create_channel(const std::string& channel_id,
                      const std::vector<std::string>& members,
                      const EndorsementPolicy& policy);

  // Validates and either commits the transaction in a fresh block or leaves
  // the ledger untouched. Never throws for rejections.
  Receipt submit(const Transaction& tx);

  // Read-only contract call against current state; does not touch the chain.
  // Contract errors propagate as Error.
  QueryResult query(const std::string& channel, const std::string& contract,
                    const std::string& method,
                    const std::vector<std::string>& args) const;

  // Raw state read. On the permissioned profile the reader must be a channel
  // member (access_denied otherwise); reader is ignored on permissionless.
  std::optional<std::string> read_state(
      const std::string& channel, const std::string& contract,
      const std::string& key,
      const std::optional<std::string>& reader = std::nullopt) const;

  crypto::Digest state_root() const;

  const std::vector<Block>& chain() const { return chain_; }
  const LedgerProfile& profile() const { return profile_; }
  std::uint64_t height() const { return chain_.back().height; }
  std::optional<ChannelConfig> channel_config(
      const std::string& channel_id) const;
  std::vector<std::string> channel_ids() const;

  // Rebuilds a ledger from history, re-validating hashes, signatures,
  // endorsements and contract execution. Throws broken_chain on any
  // divergence.
  static Ledger replay(const LedgerProfile& profile,
                       const std::vector<Block>& chain);

 private:
  friend class ContractContext;

  Ledger() = default;

  Receipt validate_and_execute(const Transaction& tx,
                               std::map<std::string, std::string>* staged,
                               std::string* result) const;
  void apply(const Transaction& tx,
             const std::map<std::string, std::string>& staged);

  using StateKey = std::tuple<std::string, std::string, std::string>;

  LedgerProfile profile_;
  std::vector<Block> chain_;
  std::map<StateKey, std::string> state_;  // (channel, contract, key) -> value
};

// Signs tx.body() with the peer's key after checking the peer exists and is
// in the channel's endorsement policy. Throws unknown_peer, not_in_policy,
// unknown_channel.
Endorsement endorse(const Ledger& ledger, const std::string& channel_id,
                    const std::string& peer_id,
                    const crypto::PrivateKey& peer_key,
                    const Transaction& tx);

// Convenience bundle for callers that build, endorse and submit in one step.
struct TxAuth {
  crypto::KeyPair sender;
  std::string channel = std::string(kDefaultChannel);
  std::vector<std::pair<std::string, crypto::PrivateKey>> endorsers;
};

// make_transaction + endorse for every endorser + submit.
Receipt submit_as(Ledger& ledger, const TxAuth& auth,
                  const std::string& contract, const std::string& method,
                  std::vector<std::string> args);

// Contract-facing view of one execution: staged writes that only land if the
// transaction commits, reads that see the overlay, and the caller identity.
class ContractContext {
 public:
  ContractContext(const Ledger& ledger, const Transaction& tx, bool read_only,
                  std::map<std::string, std::string>* staged);

  const crypto::PublicKey& sender() const { return tx_->sender; }
  const std::string& channel() const { return tx_->channel; }
  const std::string& contract() const { return tx_->contract; }
  const LedgerProfile& profile() const { return ledger_->profile_; }
  ProfileKind profile_kind() const { return ledger_->profile_.kind; }
  bool read_only() const { return read_only_; }

  std::optional<std::string> get(const std::string& key) const;
  // Throws read_only_context inside queries.
  void put(const std::string& key, const std::string& value);

 private:
  const Ledger* ledger_;
  const Transaction* tx_;
  bool read_only_;
  std::map<std::string, std::string>* staged_;
};

// Contract entry point: returns the transaction result, throws Error to
// reject. Registered statically by contract id.
using ContractFn = std::string (*)(ContractContext&, const std::string& method,
                                   const std::vector<std::string>& args);

ContractFn find_contract(const std::string& contract_id);

// Application contracts only (everything but the system contract); defined
// by the contract registry translation unit.
ContractFn find_app_contract(const std::string& contract_id);

// JSON-lines journal: a header line {format, version, profile} followed by
// one block per line. A truncated final line (no trailing newline, invalid
// JSON) is discarded on read; a newline-terminated bad line is broken_chain.
struct Journal {
  static void write(const std::filesystem::path& path, const Ledger& ledger);
  static void append_block(const std::filesystem::path& path,
                           const Block& block);
  static std::pair<LedgerProfile, std::vector<Block>> read(
      const std::filesystem::path& path);

  static std::string profile_json(const LedgerProfile& profile);
  static std::string block_json(const Block& block);
};

}  // namespace triauth::ledger
