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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triauth/crypto.hpp"
#include "triauth/encoding.hpp"
#include "triauth/error.hpp"
#include "triauth/jose.hpp"
#include "triauth/scitokens.hpp"

using namespace triauth;
using scitokens::Action;
using scitokens::ResourceRequest;
using scitokens::TokenIssuer;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::int64_t kNow = 1700000000;

TokenIssuer make_issuer(std::int64_t access_ttl = 600,
                        std::int64_t refresh_ttl = 2592000) {
  auto rng = crypto::Rng::seeded_from_string("scitokens-test");
  auto seed = rng.bytes32();
  auto keys = crypto::keygen(std::span<const std::uint8_t>(seed), "op");
  return TokenIssuer("https://issuer.test", keys, std::move(rng), access_ttl,
                     refresh_ttl);
}

errc verify_code(const std::string& token, const crypto::PublicKey& key,
                 std::int64_t now,
                 const std::optional<std::string>& aud = std::nullopt) {
  try {
    scitokens::verify_access_token(token, key, now, aud);
    return errc::usage;  // sentinel: no error
  } catch (const Error& e) {
    return e.code();
  }
}

std::vector<std::string> json_keys(const ordered_json& doc) {
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  return keys;
}

}  // namespace

TEST_CASE("scope grammar") {
  CHECK(scitokens::scope_valid("read:/data"));
  CHECK(scitokens::scope_valid("write:/"));
  CHECK(scitokens::scope_valid("read:/a/b/c"));
  CHECK_FALSE(scitokens::scope_valid("read:data"));
  CHECK_FALSE(scitokens::scope_valid("delete:/data"));
  CHECK_FALSE(scitokens::scope_valid("read"));
  CHECK_FALSE(scitokens::scope_valid(":/data"));
  CHECK_FALSE(scitokens::scope_valid(""));
  CHECK_FALSE(scitokens::scope_valid("READ:/data"));
  CHECK_FALSE(scitokens::scope_valid("read:"));
}

TEST_CASE("scope path matching honors '/' boundaries") {
  ResourceRequest read_file{Action::read, "/data/file.txt"};
  ResourceRequest read_dir{Action::read, "/data"};
  ResourceRequest read_sibling{Action::read, "/database"};
  ResourceRequest write_file{Action::write, "/data/file.txt"};

  CHECK(scitokens::scope_allows("read:/data", read_file));
  CHECK(scitokens::scope_allows("read:/data", read_dir));
  CHECK_FALSE(scitokens::scope_allows("read:/data", read_sibling));
  CHECK_FALSE(scitokens::scope_allows("read:/data", write_file));
  // write implies read, not the other way round.
  CHECK(scitokens::scope_allows("write:/data", read_file));
  CHECK(scitokens::scope_allows("write:/data", write_file));
  // Root scope covers everything.
  CHECK(scitokens::scope_allows("read:/", read_sibling));
  // Longer scope does not cover its parent.
  CHECK_FALSE(scitokens::scope_allows("read:/data/file.txt", read_dir));

  scitokens::TokenClaims claims;
  claims.scope = "read:/alpha write:/beta";
  CHECK(scitokens::authorize(claims, {Action::read, "/alpha/x"}));
  CHECK(scitokens::authorize(claims, {Action::read, "/beta/x"}));
  CHECK(scitokens::authorize(claims, {Action::write, "/beta"}));
  CHECK_FALSE(scitokens::authorize(claims, {Action::write, "/alpha"}));
  CHECK_FALSE(scitokens::authorize(claims, {Action::read, "/gamma"}));
}

TEST_CASE("issue and verify roundtrip with pinned key order") {
  auto issuer = make_issuer();
  auto token = issuer.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                         kNow, std::string("https://rp.test"));

  auto jws = jose::decode(token);
  CHECK(json_keys(jws.header) ==
        std::vector<std::string>{"alg", "typ", "kid"});
  CHECK(jws.header["alg"] == "EdDSA");
  CHECK(jws.header["typ"] == "JWT");
  CHECK(jws.header["kid"] == "op");
  CHECK(json_keys(jws.payload) ==
        std::vector<std::string>{"iss", "sub", "aud", "scope", "iat", "exp",
                                 "jti"});

  auto claims = scitokens::verify_access_token(token, issuer.public_key(),
                                               kNow + 1);
  CHECK(claims.iss == "https://issuer.test");
  CHECK(claims.sub == "alice");
  CHECK(claims.aud == "https://rp.test");
  CHECK(claims.scope == "read:/data");
  CHECK(claims.iat == kNow);
  CHECK(claims.exp == kNow + 600);
  CHECK_FALSE(claims.nbf.has_value());
  CHECK_FALSE(claims.jti.empty());

  // Without an audience the aud key is absent entirely.
  auto bare = issuer.issue_access_token("alice", {"read:/data"}, std::nullopt,
                                        kNow);
  CHECK(json_keys(jose::decode(bare).payload) ==
        std::vector<std::string>{"iss", "sub", "scope", "iat", "exp", "jti"});
}

TEST_CASE("issuance validates scopes and ttl") {
  auto issuer = make_issuer(600, 2592000);
  try {
    issuer.issue_access_token("a", {"bad scope"}, std::nullopt, kNow);
    FAIL("bad scope accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_scope);
  }
  // An empty scope list is a legal vacuous capability.
  auto vacuous = issuer.issue_access_token("a", {}, std::nullopt, kNow);
  auto vacuous_claims = scitokens::verify_access_token(
      vacuous, issuer.public_key(), kNow);
  CHECK(vacuous_claims.scope == "");
  CHECK_FALSE(scitokens::authorize(vacuous_claims,
                                   {Action::read, "/anything"}));
  try {
    issuer.issue_access_token("a", {"read:/x"}, 0, kNow);
    FAIL("zero ttl accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_validity);
  }
  try {
    issuer.issue_access_token("a", {"read:/x"}, 601, kNow);
    FAIL("oversized ttl accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::ttl_too_long);
  }
  auto token = issuer.issue_access_token("a", {"read:/x"}, 60, kNow);
  CHECK(jose::decode(token).payload["exp"] == kNow + 60);
}

TEST_CASE("jti values never repeat") {
  auto issuer = make_issuer();
  std::set<std::string> seen;
  for (int i = 0; i < 64; ++i) {
    auto token = issuer.issue_access_token("a", {"read:/x"}, std::nullopt,
                                           kNow);
    auto jti = jose::decode(token).payload["jti"].get<std::string>();
    CHECK(seen.insert(jti).second);
  }
}

TEST_CASE("expiry boundary: live strictly before exp") {
  auto issuer = make_issuer(600, 2592000);
  auto token = issuer.issue_access_token("a", {"read:/x"}, std::nullopt, kNow);
  CHECK_NOTHROW(scitokens::verify_access_token(token, issuer.public_key(),
                                               kNow + 599));
  CHECK(verify_code(token, issuer.public_key(), kNow + 600) == errc::expired);
  CHECK(verify_code(token, issuer.public_key(), kNow + 601) == errc::expired);
  CHECK_NOTHROW(scitokens::verify_access_token(token, issuer.public_key(),
                                               kNow));
}

TEST_CASE("nbf gates validity when present") {
  auto issuer = make_issuer();
  // The issuer never emits nbf; build one by hand against the same key.
  auto rng = crypto::Rng::seeded_from_string("scitokens-test");
  auto seed = rng.bytes32();
  auto keys = crypto::keygen(std::span<const std::uint8_t>(seed), "op");

  ordered_json header{{"alg", "EdDSA"}, {"typ", "JWT"}, {"kid", "op"}};
  ordered_json payload;
  payload["iss"] = "https://issuer.test";
  payload["sub"] = "a";
  payload["scope"] = "read:/x";
  payload["nbf"] = kNow + 100;
  payload["iat"] = kNow;
  payload["exp"] = kNow + 600;
  payload["jti"] = "fixed";
  auto token = jose::compact_sign(header, payload, keys.private_key);

  CHECK(verify_code(token, keys.public_key, kNow) == errc::not_yet_valid);
  CHECK(verify_code(token, keys.public_key, kNow + 99) == errc::not_yet_valid);
  CHECK_NOTHROW(scitokens::verify_access_token(token, keys.public_key,
                                               kNow + 100));
}

TEST_CASE("audience checked only when the verifier expects one") {
  auto issuer = make_issuer();
  auto with_aud = issuer.issue_access_token("a", {"read:/x"}, std::nullopt,
                                            kNow, std::string("svc-a"));
  auto without = issuer.issue_access_token("a", {"read:/x"}, std::nullopt,
                                           kNow);
  auto key = issuer.public_key();
  CHECK_NOTHROW(scitokens::verify_access_token(with_aud, key, kNow,
                                               std::string("svc-a")));
  CHECK(verify_code(with_aud, key, kNow, std::string("svc-b")) ==
        errc::audience_mismatch);
  CHECK(verify_code(without, key, kNow, std::string("svc-a")) ==
        errc::audience_mismatch);
  CHECK_NOTHROW(scitokens::verify_access_token(with_aud, key, kNow));
}

TEST_CASE("verification failure precedence") {
  auto issuer = make_issuer();
  auto other = crypto::keygen(
      std::span<const std::uint8_t>(
          crypto::Rng::seeded_from_string("other").bytes32()),
      "other");
  auto token = issuer.issue_access_token("a", {"read:/x"}, std::nullopt, kNow,
                                         std::string("svc"));

  // Wrong key beats expiry and audience: the signature check runs first.
  CHECK(verify_code(token, other.public_key, kNow + 9999,
                    std::string("nope")) == errc::bad_signature);
  // With a good signature, expiry beats audience.
  CHECK(verify_code(token, issuer.public_key(), kNow + 9999,
                    std::string("nope")) == errc::expired);
  // Structural damage beats everything.
  CHECK(verify_code("a.b", other.public_key, kNow) == errc::malformed_token);
}

TEST_CASE("malformed tokens are rejected as malformed") {
  auto issuer = make_issuer();
  auto key = issuer.public_key();
  auto good = issuer.issue_access_token("a", {"read:/x"}, std::nullopt, kNow);

  CHECK(verify_code("", key, kNow) == errc::malformed_token);
  CHECK(verify_code("x", key, kNow) == errc::malformed_token);
  CHECK(verify_code("a.b.c.d", key, kNow) == errc::malformed_token);
  CHECK(verify_code("!!.??.##", key, kNow) == errc::malformed_token);
  CHECK(verify_code(good + ".", key, kNow) == errc::malformed_token);

  // alg none, alg RS256, wrong typ, each signed with the real key.
  auto rng = crypto::Rng::seeded_from_string("scitokens-test");
  auto seed = rng.bytes32();
  auto keys = crypto::keygen(std::span<const std::uint8_t>(seed), "op");
  ordered_json payload;
  payload["iss"] = "https://issuer.test";
  payload["sub"] = "a";
  payload["scope"] = "read:/x";
  payload["iat"] = kNow;
  payload["exp"] = kNow + 600;
  payload["jti"] = "j";
  for (ordered_json header :
       {ordered_json{{"alg", "none"}, {"typ", "JWT"}},
        ordered_json{{"alg", "RS256"}, {"typ", "JWT"}},
        ordered_json{{"alg", "EdDSA"}, {"typ", "JOSE"}},
        ordered_json{{"typ", "JWT"}}}) {
    auto token = jose::compact_sign(header, payload, keys.private_key);
    CHECK(verify_code(token, key, kNow) == errc::malformed_token);
  }

  // Missing required claims.
  for (const char* drop : {"iss", "sub", "scope", "iat", "exp", "jti"}) {
    ordered_json partial = payload;
    partial.erase(drop);
    auto token = jose::compact_sign(
        ordered_json{{"alg", "EdDSA"}, {"typ", "JWT"}, {"kid", "op"}}, partial,
        keys.private_key);
    CHECK(verify_code(token, key, kNow) == errc::malformed_token);
  }
}

TEST_CASE("any payload edit invalidates the signature") {
  auto issuer = make_issuer();
  auto token = issuer.issue_access_token("alice", {"read:/x"}, std::nullopt,
                                         kNow);
  auto jws = jose::decode(token);
  ordered_json payload = jws.payload;
  payload["scope"] = "write:/";
  auto forged = jws.header_b64 + "." +
                triauth::b64url_encode(payload.dump()) + "." +
                jws.signature.to_b64url();
  CHECK(verify_code(forged, issuer.public_key(), kNow) == errc::bad_signature);
}

TEST_CASE("refresh token lifecycle") {
  auto issuer = make_issuer(600, 3600);
  auto refresh = issuer.issue_refresh_token("alice", {"read:/data"}, kNow);
  CHECK(refresh.sub == "alice");
  CHECK_FALSE(refresh.revoked);

  auto access = issuer.refresh(refresh.id, kNow + 100);
  auto claims = scitokens::verify_access_token(access, issuer.public_key(),
                                               kNow + 101);
  CHECK(claims.sub == "alice");
  CHECK(claims.scope == "read:/data");
  CHECK(claims.iat == kNow + 100);

  try {
    issuer.refresh("missing", kNow);
    FAIL("unknown refresh accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_refresh_token);
  }

  // Live strictly before issued_at + refresh_ttl.
  CHECK_NOTHROW(issuer.refresh(refresh.id, kNow + 3599));
  try {
    issuer.refresh(refresh.id, kNow + 3600);
    FAIL("expired refresh accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::expired);
  }

  issuer.revoke_refresh(refresh.id);
  issuer.revoke_refresh(refresh.id);  // idempotent
  try {
    issuer.refresh(refresh.id, kNow + 10);
    FAIL("revoked refresh accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::revoked_token);
  }
  try {
    issuer.revoke_refresh("missing");
    FAIL("unknown revoke accepted");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_refresh_token);
  }

  // Revocation does not reach into already-issued access tokens.
  CHECK_NOTHROW(scitokens::verify_access_token(access, issuer.public_key(),
                                               kNow + 400));
}

TEST_CASE("issuer state transfer preserves refresh and jti sets") {
  auto issuer = make_issuer();
  auto refresh = issuer.issue_refresh_token("alice", {"read:/x"}, kNow);
  auto token = issuer.issue_access_token("alice", {"read:/x"}, std::nullopt,
                                         kNow);
  auto jti = jose::decode(token).payload["jti"].get<std::string>();

  auto restored = make_issuer();
  for (const auto& rt : issuer.refresh_tokens())
    restored.restore_refresh_token(rt);
  for (const auto& j : issuer.issued_jti()) restored.restore_jti(j);

  CHECK(restored.find_refresh(refresh.id).has_value());
  auto jtis = restored.issued_jti();
  CHECK(std::find(jtis.begin(), jtis.end(), jti) != jtis.end());
  CHECK_NOTHROW(restored.refresh(refresh.id, kNow + 1));
}

TEST_CASE("issuer constructor rejects bad ttl configuration") {
  auto rng = crypto::Rng::seeded_from_string("ttl");
  auto seed = rng.bytes32();
  auto keys = crypto::keygen(std::span<const std::uint8_t>(seed), "k");
  CHECK_THROWS_AS(TokenIssuer("iss", keys, crypto::Rng::seeded_from_string("a"),
                              0, 100),
                  Error);
  CHECK_THROWS_AS(TokenIssuer("iss", keys, crypto::Rng::seeded_from_string("a"),
                              200, 100),
                  Error);
}
