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

#include "triauth/scitokens.hpp"

#include <mutex>
#include <sstream>

#include "triauth/error.hpp"
#include "triauth/jose.hpp"

namespace triauth::scitokens {

namespace {

struct ParsedScope {
  Action action;
  std::string_view path;
};

std::optional<ParsedScope> parse_scope(std::string_view scope) {
  auto colon = scope.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  std::string_view action = scope.substr(0, colon);
  std::string_view path = scope.substr(colon + 1);
  if (path.empty() || path.front() != '/') return std::nullopt;
  if (action == "read") return ParsedScope{Action::read, path};
  if (action == "write") return ParsedScope{Action::write, path};
  return std::nullopt;
}

// p grants r when p == r, or p is a prefix of r that ends on a path
// component boundary.
bool path_prefix(std::string_view p, std::string_view r) {
  if (p == r) return true;
  if (r.size() <= p.size() || r.compare(0, p.size(), p) != 0) return false;
  return p.back() == '/' || r[p.size()] == '/';
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) parts.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::int64_t require_int(const nlohmann::ordered_json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw Error(errc::malformed_token,
                std::string("claim '") + key + "' missing or not an integer");
  }
  return doc[key].get<std::int64_t>();
}

std::string require_string(const nlohmann::ordered_json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string()) {
    throw Error(errc::malformed_token,
                std::string("claim '") + key + "' missing or not a string");
  }
  return doc[key].get<std::string>();
}

}  // namespace

std::string_view action_name(Action a) noexcept {
  return a == Action::read ? "read" : "write";
}

bool scope_valid(std::string_view scope) {
  return parse_scope(scope).has_value();
}

bool scope_allows(std::string_view scope, const ResourceRequest& request) {
  auto parsed = parse_scope(scope);
  if (!parsed) return false;
  if (request.path.empty() || request.path.front() != '/') return false;
  if (parsed->action == Action::read && request.action == Action::write) {
    return false;
  }
  return path_prefix(parsed->path, request.path);
}

bool authorize(const TokenClaims& claims, const ResourceRequest& request) {
  for (auto scope : split(claims.scope, ' ')) {
    if (scope_allows(scope, request)) return true;
  }
  return false;
}

TokenClaims verify_access_token(const std::string& token,
                                const crypto::PublicKey& issuer_key,
                                std::int64_t now,
                                const std::optional<std::string>& expected_aud) {
  jose::DecodedJws jws = jose::decode(token);

  if (!jws.header.contains("alg") || jws.header["alg"] != "EdDSA") {
    throw Error(errc::malformed_token, "header alg must be EdDSA");
  }
  if (!jws.header.contains("typ") || jws.header["typ"] != "JWT") {
    throw Error(errc::malformed_token, "header typ must be JWT");
  }

  TokenClaims claims;
  claims.iss = require_string(jws.payload, "iss");
  claims.sub = require_string(jws.payload, "sub");
  claims.scope = require_string(jws.payload, "scope");
  claims.iat = require_int(jws.payload, "iat");
  claims.exp = require_int(jws.payload, "exp");
  claims.jti = require_string(jws.payload, "jti");
  if (jws.payload.contains("aud")) {
    if (!jws.payload["aud"].is_string()) {
      throw Error(errc::malformed_token, "claim 'aud' not a string");
    }
    claims.aud = jws.payload["aud"].get<std::string>();
  }
  if (jws.payload.contains("nbf")) {
    if (!jws.payload["nbf"].is_number_integer()) {
      throw Error(errc::malformed_token, "claim 'nbf' not an integer");
    }
    claims.nbf = jws.payload["nbf"].get<std::int64_t>();
  }

  if (!jose::verify_signature(jws, issuer_key)) {
    throw Error(errc::bad_signature);
  }
  if (claims.nbf && now < *claims.nbf) {
    throw Error(errc::not_yet_valid);
  }
  if (now >= claims.exp) {
    throw Error(errc::expired);
  }
  if (expected_aud && claims.aud != expected_aud) {
    throw Error(errc::audience_mismatch);
  }
  return claims;
}

TokenIssuer::TokenIssuer(std::string iss, crypto::KeyPair keys,
                         crypto::Rng rng, std::int64_t access_ttl,
                         std::int64_t refresh_ttl)
    : iss_(std::move(iss)),
      keys_(std::move(keys)),
      access_ttl_(access_ttl),
      refresh_ttl_(refresh_ttl),
      rng_(std::move(rng)) {
  if (access_ttl_ < 1 || refresh_ttl_ < 1) {
    throw Error(errc::bad_validity, "ttls must be positive");
  }
  if (access_ttl_ > refresh_ttl_) {
    throw Error(errc::ttl_too_long, "access ttl exceeds refresh ttl");
  }
}

std::string TokenIssuer::fresh_jti_locked() {
  std::string jti = rng_.token(16);
  while (issued_jti_.count(jti) != 0) jti = rng_.token(16);
  issued_jti_.insert(jti);
  return jti;
}

std::string TokenIssuer::issue_access_token(
    const std::string& sub, const std::vector<std::string>& scopes,
    std::optional<std::int64_t> ttl_override, std::int64_t now,
    const std::optional<std::string>& aud) {
  for (const auto& s : scopes) {
    if (!scope_valid(s)) {
      throw Error(errc::bad_scope, "scope '" + s + "' does not match "
                                   "<read|write>:</absolute/path>");
    }
  }
  std::int64_t ttl = access_ttl_;
  if (ttl_override) {
    if (*ttl_override < 1) {
      throw Error(errc::bad_validity, "ttl override must be positive");
    }
    if (*ttl_override > access_ttl_) {
      throw Error(errc::ttl_too_long);
    }
    ttl = *ttl_override;
  }

  std::string joined;
  for (const auto& s : scopes) {
    if (!joined.empty()) joined += ' ';
    joined += s;
  }

  std::unique_lock lock(mutex_);
  nlohmann::ordered_json header = {
      {"alg", "EdDSA"}, {"typ", "JWT"}, {"kid", keys_.key_id}};
  nlohmann::ordered_json payload;
  payload["iss"] = iss_;
  payload["sub"] = sub;
  if (aud) payload["aud"] = *aud;
  payload["scope"] = joined;
  payload["iat"] = now;
  payload["exp"] = now + ttl;
  payload["jti"] = fresh_jti_locked();
  return jose::compact_sign(header, payload, keys_.private_key);
}

RefreshToken TokenIssuer::issue_refresh_token(
    const std::string& sub, const std::vector<std::string>& scopes,
    std::int64_t now) {
  for (const auto& s : scopes) {
    if (!scope_valid(s)) {
      throw Error(errc::bad_scope, "scope '" + s + "' does not match "
                                   "<read|write>:</absolute/path>");
    }
  }
  std::unique_lock lock(mutex_);
  RefreshToken token;
  token.id = rng_.token(32);
  while (refresh_.count(token.id) != 0) token.id = rng_.token(32);
  token.sub = sub;
  token.scopes = scopes;
  token.issued_at = now;
  token.revoked = false;
  refresh_.emplace(token.id, token);
  return token;
}

std::string TokenIssuer::refresh(const std::string& refresh_id,
                                 std::int64_t now) {
  std::vector<std::string> scopes;
  std::string sub;
  {
    std::unique_lock lock(mutex_);
    auto it = refresh_.find(refresh_id);
    if (it == refresh_.end()) throw Error(errc::unknown_refresh_token);
    if (it->second.revoked) throw Error(errc::revoked_token);
    if (now >= it->second.issued_at + refresh_ttl_) {
      throw Error(errc::expired, "refresh token expired");
    }
    sub = it->second.sub;
    scopes = it->second.scopes;
  }
  return issue_access_token(sub, scopes, std::nullopt, now);
}

void TokenIssuer::revoke_refresh(const std::string& refresh_id) {
  std::unique_lock lock(mutex_);
  auto it = refresh_.find(refresh_id);
  if (it == refresh_.end()) throw Error(errc::unknown_refresh_token);
  it->second.revoked = true;
}

std::optional<RefreshToken> TokenIssuer::find_refresh(
    const std::string& refresh_id) const {
  std::shared_lock lock(mutex_);
  auto it = refresh_.find(refresh_id);
  if (it == refresh_.end()) return std::nullopt;
  return it->second;
}

std::vector<RefreshToken> TokenIssuer::refresh_tokens() const {
  std::shared_lock lock(mutex_);
  std::vector<RefreshToken> out;
  out.reserve(refresh_.size());
  for (const auto& [id, token] : refresh_) out.push_back(token);
  return out;
}

void TokenIssuer::restore_refresh_token(const RefreshToken& token) {
  std::unique_lock lock(mutex_);
  refresh_[token.id] = token;
}

std::vector<std::string> TokenIssuer::issued_jti() const {
  std::shared_lock lock(mutex_);
  return {issued_jti_.begin(), issued_jti_.end()};
}

void TokenIssuer::restore_jti(const std::string& jti) {
  std::unique_lock lock(mutex_);
  issued_jti_.insert(jti);
}

}  // namespace triauth::scitokens
