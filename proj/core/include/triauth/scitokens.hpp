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
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "triauth/crypto.hpp"

namespace triauth::scitokens {

struct TokenClaims {
  std::string iss;
  std::string sub;
  std::optional<std::string> aud;
  std::string scope;  // space-separated scope strings
  std::optional<std::int64_t> nbf;
  std::int64_t iat = 0;
  std::int64_t exp = 0;
  std::string jti;
};

enum class Action { read, write };

std::string_view action_name(Action a) noexcept;

struct ResourceRequest {
  Action action = Action::read;
  std::string path;  // absolute, '/'-rooted
};

// Grammar: "<action>:<path>" with action "read" or "write" and path
// starting with '/'.
bool scope_valid(std::string_view scope);

// True iff the single scope grants the request: the action matches (write
// grants read), and the scope path equals the request path or is a
// '/'-boundary prefix of it.
bool scope_allows(std::string_view scope, const ResourceRequest& request);

// True iff any scope in claims.scope allows the request.
bool authorize(const TokenClaims& claims, const ResourceRequest& request);

// Stateless bearer-token check: needs only the compact string and the
// issuer's public key. Returns the claims; throws malformed_token,
// bad_signature, not_yet_valid, expired or audience_mismatch. A token is
// live at now iff now < exp, and (when nbf is present) now >= nbf.
TokenClaims verify_access_token(
    const std::string& token, const crypto::PublicKey& issuer_key,
    std::int64_t now,
    const std::optional<std::string>& expected_aud = std::nullopt);

struct RefreshToken {
  std::string id;  // 32 random bytes, base64url
  std::string sub;
  std::vector<std::string> scopes;
  std::int64_t issued_at = 0;
  bool revoked = false;
};

// Issues signed access tokens and revocable refresh tokens for one issuer
// URI. Issuance and revocation serialize through an internal lock; reads are
// concurrent. Every timestamp is a parameter; the issuer never consults a
// system clock.
class TokenIssuer {
 public:
  TokenIssuer(std::string iss, crypto::KeyPair keys, crypto::Rng rng,
              std::int64_t access_ttl = 600,
              std::int64_t refresh_ttl = 2592000);

  // Returns the compact JWT. Payload keys are emitted in the order
  // iss, sub, aud (when given), scope, iat, exp, jti.
  // Throws bad_scope, bad_validity (ttl_override < 1), ttl_too_long.
  std::string issue_access_token(const std::string& sub,
                                 const std::vector<std::string>& scopes,
                                 std::optional<std::int64_t> ttl_override,
                                 std::int64_t now,
                                 const std::optional<std::string>& aud = {});

  RefreshToken issue_refresh_token(const std::string& sub,
                                   const std::vector<std::string>& scopes,
                                   std::int64_t now);

  // New access token carrying the refresh token's sub and scopes.
  // Throws unknown_refresh_token, revoked_token, expired. A refresh token is
  // live at now iff now < issued_at + refresh_ttl.
  std::string refresh(const std::string& refresh_id, std::int64_t now);

  // Permanent; repeated revocation is a no-op. Throws unknown_refresh_token.
  void revoke_refresh(const std::string& refresh_id);

  std::optional<RefreshToken> find_refresh(const std::string& refresh_id) const;

  const std::string& iss() const { return iss_; }
  const crypto::PublicKey& public_key() const { return keys_.public_key; }
  const std::string& key_id() const { return keys_.key_id; }
  std::int64_t access_ttl() const { return access_ttl_; }
  std::int64_t refresh_ttl() const { return refresh_ttl_; }

  // State transfer for file-backed deployments.
  std::vector<RefreshToken> refresh_tokens() const;
  void restore_refresh_token(const RefreshToken& token);
  std::vector<std::string> issued_jti() const;
  void restore_jti(const std::string& jti);

 private:
  std::string fresh_jti_locked();

  std::string iss_;
  crypto::KeyPair keys_;
  std::int64_t access_ttl_;
  std::int64_t refresh_ttl_;

  mutable std::shared_mutex mutex_;
  crypto::Rng rng_;
  std::set<std::string> issued_jti_;
  std::map<std::string, RefreshToken> refresh_;
};

}  // namespace triauth::scitokens
