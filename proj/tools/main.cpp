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

#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "service.hpp"
#include "triauth/error.hpp"
#include "workspace.hpp"

namespace {

using triauth::Error;
using triauth::errc;
using triauth::tool::ChannelSpec;
using triauth::tool::CommandResult;
using triauth::tool::Workspace;
using ordered_json = nlohmann::ordered_json;

struct Globals {
  std::string workspace = ".";
  std::optional<std::int64_t> now;
  std::optional<std::string> seed;
  bool json = false;
};

std::vector<std::pair<std::string, std::string>> parse_pairs(
    const std::vector<std::string>& items, const char* what) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError(std::string(what) + " must be name=value");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

std::vector<ChannelSpec> parse_channels(
    const std::vector<std::string>& items) {
  // id:threshold:member,member:peer,peer
  std::vector<ChannelSpec> out;
  for (const auto& item : items) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= item.size(); ++i) {
      if (i == item.size() || item[i] == ':') {
        parts.push_back(item.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 4)
      throw CLI::ValidationError(
          "--channel must be id:threshold:members:peers");
    auto split_commas = [](const std::string& text) {
      std::vector<std::string> names;
      std::size_t from = 0;
      for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
          if (i > from) names.push_back(text.substr(from, i - from));
          from = i + 1;
        }
      }
      return names;
    };
    ChannelSpec spec;
    spec.id = parts[0];
    spec.threshold = static_cast<std::size_t>(std::stoul(parts[1]));
    spec.members = split_commas(parts[2]);
    spec.peers = split_commas(parts[3]);
    out.push_back(std::move(spec));
  }
  return out;
}

// Human rendering: verdict bodies print valid/invalid with reasons, anything
// else pretty-prints. --json always prints the exact machine body.
void print_result(const Globals& globals, const CommandResult& result) {
  if (globals.json) {
    std::printf("%s\n", result.body.dump().c_str());
    return;
  }
  if (result.body.is_object() && result.body.contains("valid")) {
    if (result.body["valid"].get<bool>()) {
      std::printf("valid\n");
    } else {
      std::string reasons;
      for (const auto& r : result.body["reasons"]) {
        if (!reasons.empty()) reasons += ", ";
        reasons += r.get<std::string>();
      }
      std::printf("invalid: %s\n", reasons.c_str());
    }
    return;
  }
  std::printf("%s\n", result.body.dump(2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-mechanism credential toolkit: capability tokens, "
               "verifiable credentials, and a simulated smart-contract "
               "ledger"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--workspace", globals.workspace,
                 "Workspace directory (default: current directory)");
  app.add_option("--now", globals.now,
                 "Fixed epoch seconds for all time checks");
  app.add_option("--seed", globals.seed,
                 "Deterministic randomness seed string");
  app.add_flag("--json", globals.json, "Machine-readable output");

  // Under --seed the stream is derived from the seed and the full command
  // line. Different invocations sharing one seed then draw independent
  // randomness (salts, ids), while replaying an identical command remains
  // bit-for-bit deterministic.
  auto effective_seed = [&]() -> std::optional<std::string> {
    if (!globals.seed) return std::nullopt;
    triauth::crypto::CanonicalRecord record{{"seed", *globals.seed}};
    for (int i = 1; i < argc; ++i)
      record.add("arg" + std::to_string(i), argv[i]);
    return triauth::crypto::sha256(triauth::crypto::canonical_encode(record))
        .to_b64url();
  };

  std::optional<Workspace> workspace;
  auto ws = [&]() -> Workspace& {
    if (!workspace)
      workspace.emplace(globals.workspace, effective_seed(), globals.now);
    return *workspace;
  };

  std::function<CommandResult()> action;

  // keygen
  {
    auto* cmd = app.add_subcommand("keygen", "Generate an Ed25519 keypair");
    auto id = std::make_shared<std::string>();
    cmd->add_option("--id", *id, "Key id in the keystore")->required();
    cmd->callback([&, id] {
      action = [&, id] { return triauth::tool::cmd_keygen(ws(), *id); };
    });
  }

  // token
  {
    auto* token = app.add_subcommand("token", "Capability tokens");
    token->require_subcommand(1);

    auto* issue = token->add_subcommand("issue", "Issue access + refresh");
    auto sub = std::make_shared<std::string>();
    auto scopes = std::make_shared<std::vector<std::string>>();
    auto aud = std::make_shared<std::string>();
    auto ttl = std::make_shared<std::int64_t>(0);
    issue->add_option("--sub", *sub, "Subject")->required();
    issue->add_option("--scope", *scopes, "Scope action:path (repeatable)")
        ->required();
    auto* aud_opt = issue->add_option("--aud", *aud, "Audience");
    auto* ttl_opt = issue->add_option("--ttl", *ttl, "Access TTL seconds");
    issue->callback([&, sub, scopes, aud, ttl, aud_opt, ttl_opt] {
      action = [&, sub, scopes, aud, ttl, aud_opt, ttl_opt] {
        std::optional<std::string> aud_v;
        if (aud_opt->count()) aud_v = *aud;
        std::optional<std::int64_t> ttl_v;
        if (ttl_opt->count()) ttl_v = *ttl;
        return triauth::tool::cmd_token_issue(ws(), *sub, *scopes, aud_v,
                                              ttl_v);
      };
    });

    auto* verify = token->add_subcommand("verify", "Verify an access token");
    auto vt = std::make_shared<std::string>();
    auto vaud = std::make_shared<std::string>();
    verify->add_option("--token", *vt, "Compact JWT")->required();
    auto* vaud_opt = verify->add_option("--aud", *vaud, "Expected audience");
    verify->callback([&, vt, vaud, vaud_opt] {
      action = [&, vt, vaud, vaud_opt] {
        std::optional<std::string> aud_v;
        if (vaud_opt->count()) aud_v = *vaud;
        return triauth::tool::cmd_token_verify(ws(), *vt, aud_v);
      };
    });

    auto* refresh = token->add_subcommand("refresh", "Redeem a refresh token");
    auto rid = std::make_shared<std::string>();
    refresh->add_option("--refresh", *rid, "Refresh token id")->required();
    refresh->callback([&, rid] {
      action = [&, rid] {
        return triauth::tool::cmd_token_refresh(ws(), *rid);
      };
    });

    auto* revoke = token->add_subcommand("revoke", "Revoke a refresh token");
    auto kid = std::make_shared<std::string>();
    revoke->add_option("--refresh", *kid, "Refresh token id")->required();
    revoke->callback([&, kid] {
      action = [&, kid] {
        return triauth::tool::cmd_token_revoke(ws(), *kid);
      };
    });
  }

  // vc
  {
    auto* vc = app.add_subcommand("vc", "Verifiable credentials");
    vc->require_subcommand(1);

    auto* reg = vc->add_subcommand("register-issuer",
                                   "Register an issuer key in the registry");
    auto rissuer = std::make_shared<std::string>();
    auto rkey = std::make_shared<std::string>();
    reg->add_option("--issuer", *rissuer, "Issuer id")->required();
    reg->add_option("--key", *rkey, "Keystore key id")->required();
    reg->callback([&, rissuer, rkey] {
      action = [&, rissuer, rkey] {
        return triauth::tool::cmd_vc_register_issuer(ws(), *rissuer, *rkey);
      };
    });

    auto* issue = vc->add_subcommand("issue", "Issue a credential");
    auto iissuer = std::make_shared<std::string>();
    auto ikey = std::make_shared<std::string>();
    auto iholder = std::make_shared<std::string>();
    auto iattrs = std::make_shared<std::vector<std::string>>();
    auto ifrom = std::make_shared<std::int64_t>(0);
    auto iuntil = std::make_shared<std::int64_t>(0);
    auto iout = std::make_shared<std::string>("credential.json");
    auto isecrets = std::make_shared<std::string>("secrets.json");
    issue->add_option("--issuer", *iissuer, "Issuer id")->required();
    issue->add_option("--key", *ikey, "Issuer keystore key id")->required();
    issue->add_option("--holder", *iholder,
                      "Holder public key (base64url) or keystore key id")
        ->required();
    issue->add_option("--attr", *iattrs, "Attribute label=value (repeatable)")
        ->required();
    issue->add_option("--from", *ifrom, "valid_from epoch seconds")
        ->required();
    issue->add_option("--until", *iuntil, "valid_until epoch seconds")
        ->required();
    issue->add_option("--out", *iout, "Credential output file");
    issue->add_option("--secrets", *isecrets, "Attribute store output file");
    issue->callback([&, iissuer, ikey, iholder, iattrs, ifrom, iuntil, iout,
                     isecrets] {
      action = [&, iissuer, ikey, iholder, iattrs, ifrom, iuntil, iout,
                isecrets] {
        std::map<std::string, std::string> attrs;
        for (auto& [label, value] : parse_pairs(*iattrs, "--attr"))
          attrs[label] = value;
        return triauth::tool::cmd_vc_issue(ws(), *iissuer, *ikey, *iholder,
                                           attrs, *ifrom, *iuntil, *iout,
                                           *isecrets);
      };
    });

    auto* present = vc->add_subcommand("present", "Derive a presentation");
    auto pcred = std::make_shared<std::string>();
    auto psecrets = std::make_shared<std::string>();
    auto pkey = std::make_shared<std::string>();
    auto pdisclose = std::make_shared<std::vector<std::string>>();
    auto pchallenge = std::make_shared<std::string>();
    auto pout = std::make_shared<std::string>("presentation.json");
    present->add_option("--credential", *pcred, "Credential file")
        ->required();
    present->add_option("--secrets", *psecrets, "Attribute store file")
        ->required();
    present->add_option("--holder-key", *pkey, "Holder keystore key id")
        ->required();
    present->add_option("--disclose", *pdisclose,
                        "Attribute label to disclose (repeatable)")
        ->required();
    present->add_option("--challenge", *pchallenge, "Verifier challenge")
        ->required();
    present->add_option("--out", *pout, "Presentation output file");
    present->callback([&, pcred, psecrets, pkey, pdisclose, pchallenge,
                       pout] {
      action = [&, pcred, psecrets, pkey, pdisclose, pchallenge, pout] {
        return triauth::tool::cmd_vc_present(ws(), *pcred, *psecrets, *pkey,
                                             *pdisclose, *pchallenge, *pout);
      };
    });

    auto* verify = vc->add_subcommand("verify", "Verify a presentation");
    auto vfile = std::make_shared<std::string>();
    auto vchallenge = std::make_shared<std::string>();
    verify->add_option("--presentation", *vfile, "Presentation file")
        ->required();
    verify->add_option("--challenge", *vchallenge, "Expected challenge")
        ->required();
    verify->callback([&, vfile, vchallenge] {
      action = [&, vfile, vchallenge] {
        std::ifstream in(*vfile, std::ios::binary);
        if (!in.is_open())
          throw Error(errc::corrupt_workspace, *vfile);
        std::ostringstream buf;
        buf << in.rdbuf();
        return triauth::tool::cmd_vc_verify(ws(), buf.str(), *vchallenge);
      };
    });

    auto* revoke = vc->add_subcommand("revoke", "Revoke a credential status");
    auto rstatus = std::make_shared<std::string>();
    revoke->add_option("--status", *rstatus, "Status id")->required();
    revoke->callback([&, rstatus] {
      action = [&, rstatus] {
        return triauth::tool::cmd_vc_revoke(ws(), *rstatus);
      };
    });
  }

  // ledger
  {
    auto* lg = app.add_subcommand("ledger", "Simulated ledger");
    lg->require_subcommand(1);

    auto* init = lg->add_subcommand("init", "Initialize ledger.journal");
    auto profile = std::make_shared<std::string>("permissionless");
    auto accounts = std::make_shared<std::vector<std::string>>();
    auto peers = std::make_shared<std::vector<std::string>>();
    auto channels = std::make_shared<std::vector<std::string>>();
    auto force = std::make_shared<bool>(false);
    init->add_option("--profile", *profile,
                     "permissionless or permissioned");
    init->add_option("--account", *accounts,
                     "Keystore key id to enroll (repeatable; default: all)");
    init->add_option("--peer", *peers, "Peer id=keystore-key (repeatable)");
    init->add_option("--channel", *channels,
                     "Channel id:threshold:members:peers (repeatable)");
    init->add_flag("--force", *force, "Replace an existing journal");
    init->callback([&, profile, accounts, peers, channels, force] {
      action = [&, profile, accounts, peers, channels, force] {
        return triauth::tool::cmd_ledger_init(
            ws(), *profile, *accounts, parse_pairs(*peers, "--peer"),
            parse_channels(*channels), *force);
      };
    });

    auto* submit = lg->add_subcommand("submit", "Submit a transaction");
    auto sender = std::make_shared<std::string>();
    auto channel = std::make_shared<std::string>("main");
    auto contract = std::make_shared<std::string>();
    auto method = std::make_shared<std::string>();
    auto args = std::make_shared<std::vector<std::string>>();
    auto endorse = std::make_shared<std::vector<std::string>>();
    submit->add_option("--sender", *sender, "Sender keystore key id")
        ->required();
    submit->add_option("--channel", *channel, "Channel id");
    submit->add_option("--contract", *contract, "Contract id")->required();
    submit->add_option("--method", *method, "Contract method")->required();
    submit->add_option("--arg", *args, "Positional argument (repeatable)");
    submit->add_option("--endorse", *endorse,
                       "Endorsement peer=keystore-key (repeatable)");
    submit->callback([&, sender, channel, contract, method, args, endorse] {
      action = [&, sender, channel, contract, method, args, endorse] {
        return triauth::tool::cmd_ledger_submit(
            ws(), *sender, *channel, *contract, *method, *args,
            parse_pairs(*endorse, "--endorse"));
      };
    });

    auto* replay = lg->add_subcommand("replay",
                                      "Re-validate the journal from genesis");
    replay->callback([&] {
      action = [&] { return triauth::tool::cmd_ledger_replay(ws()); };
    });

    auto* root = lg->add_subcommand("root", "Print the current state root");
    root->callback([&] {
      action = [&] { return triauth::tool::cmd_ledger_root(ws()); };
    });
  }

  // cert
  {
    auto* cert = app.add_subcommand("cert", "Student certificate contract");
    cert->require_subcommand(1);

    auto* issue = cert->add_subcommand("issue", "Issue a certificate");
    auto sender = std::make_shared<std::string>();
    auto channel = std::make_shared<std::string>("main");
    auto endorse = std::make_shared<std::vector<std::string>>();
    auto name = std::make_shared<std::string>();
    auto program = std::make_shared<std::string>();
    auto date = std::make_shared<std::string>();
    auto gpa = std::make_shared<std::string>();
    auto proof = std::make_shared<bool>(false);
    issue->add_option("--sender", *sender, "Sender keystore key id")
        ->required();
    issue->add_option("--channel", *channel, "Channel id");
    issue->add_option("--endorse", *endorse,
                      "Endorsement peer=keystore-key (repeatable)");
    issue->add_option("--name", *name, "Student name")->required();
    issue->add_option("--program", *program, "Program")->required();
    issue->add_option("--date", *date, "Graduation date")->required();
    issue->add_option("--gpa", *gpa, "GPA, two decimals")->required();
    issue->add_flag("--proof", *proof, "Attach an issuer proof signature");
    issue->callback([&, sender, channel, endorse, name, program, date, gpa,
                     proof] {
      action = [&, sender, channel, endorse, name, program, date, gpa,
                proof] {
        return triauth::tool::cmd_cert_issue(
            ws(), *sender, *channel, parse_pairs(*endorse, "--endorse"),
            *name, *program, *date, *gpa, *proof);
      };
    });

    auto* verify = cert->add_subcommand("verify", "Verify a certificate");
    auto vid = std::make_shared<std::string>();
    auto vname = std::make_shared<std::string>();
    auto vprogram = std::make_shared<std::string>();
    auto vdate = std::make_shared<std::string>();
    auto vgpa = std::make_shared<std::string>();
    auto vchannel = std::make_shared<std::string>("main");
    verify->add_option("--id", *vid, "Certificate id")->required();
    verify->add_option("--name", *vname, "Student name")->required();
    verify->add_option("--program", *vprogram, "Program")->required();
    verify->add_option("--date", *vdate, "Graduation date")->required();
    verify->add_option("--gpa", *vgpa, "GPA, two decimals")->required();
    verify->add_option("--channel", *vchannel, "Channel id");
    verify->callback([&, vid, vname, vprogram, vdate, vgpa, vchannel] {
      action = [&, vid, vname, vprogram, vdate, vgpa, vchannel] {
        return triauth::tool::cmd_cert_verify(ws(), *vid, *vname, *vprogram,
                                              *vdate, *vgpa, *vchannel);
      };
    });

    auto* revoke = cert->add_subcommand("revoke", "Revoke a certificate");
    auto rsender = std::make_shared<std::string>();
    auto rchannel = std::make_shared<std::string>("main");
    auto rendorse = std::make_shared<std::vector<std::string>>();
    auto rid = std::make_shared<std::string>();
    revoke->add_option("--sender", *rsender, "Sender keystore key id")
        ->required();
    revoke->add_option("--channel", *rchannel, "Channel id");
    revoke->add_option("--endorse", *rendorse,
                       "Endorsement peer=keystore-key (repeatable)");
    revoke->add_option("--id", *rid, "Certificate id")->required();
    revoke->callback([&, rsender, rchannel, rendorse, rid] {
      action = [&, rsender, rchannel, rendorse, rid] {
        return triauth::tool::cmd_cert_revoke(
            ws(), *rsender, *rchannel, parse_pairs(*rendorse, "--endorse"),
            *rid);
      };
    });
  }

  // bridge
  {
    auto* bridge = app.add_subcommand(
        "bridge", "Ledger-anchored certificates wrapped as JWTs");
    bridge->require_subcommand(1);

    auto* issue = bridge->add_subcommand("issue",
                                         "Issue on-chain and emit a JWT");
    auto sender = std::make_shared<std::string>();
    auto token_key = std::make_shared<std::string>();
    auto issuer = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    auto program = std::make_shared<std::string>();
    auto date = std::make_shared<std::string>();
    auto gpa = std::make_shared<std::string>();
    issue->add_option("--sender", *sender, "Sender keystore key id")
        ->required();
    issue->add_option("--token-key", *token_key, "JWT signing key id")
        ->required();
    issue->add_option("--issuer", *issuer, "Issuer id for the JWT payload")
        ->required();
    issue->add_option("--name", *name, "Student name")->required();
    issue->add_option("--program", *program, "Program")->required();
    issue->add_option("--date", *date, "Graduation date")->required();
    issue->add_option("--gpa", *gpa, "GPA, two decimals")->required();
    issue->callback([&, sender, token_key, issuer, name, program, date,
                     gpa] {
      action = [&, sender, token_key, issuer, name, program, date, gpa] {
        return triauth::tool::cmd_bridge_issue(ws(), *sender, *token_key,
                                               *issuer, *name, *program,
                                               *date, *gpa);
      };
    });

    auto* verify = bridge->add_subcommand("verify",
                                          "Verify a bridged certificate");
    auto jwt = std::make_shared<std::string>();
    auto key = std::make_shared<std::string>();
    verify->add_option("--jwt", *jwt, "Compact JWT")->required();
    verify->add_option("--token-key", *key,
                       "JWT public key (base64url) or keystore key id")
        ->required();
    verify->callback([&, jwt, key] {
      action = [&, jwt, key] {
        return triauth::tool::cmd_bridge_verify(ws(), *jwt, *key);
      };
    });
  }

  // harness
  {
    auto* harness = app.add_subcommand("harness", "Comparison matrix");
    harness->require_subcommand(1);
    auto* run = harness->add_subcommand("run", "Run all 24 scenarios");
    auto out = std::make_shared<std::string>(".");
    run->add_option("--out", *out, "Directory for matrix.json / matrix.txt");
    run->callback([&, out] {
      action = [&, out] { return triauth::tool::cmd_harness_run(*out); };
    });
  }

  // serve
  bool serve_requested = false;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  {
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--host", serve_host, "Bind address");
    serve->add_option("--port", serve_port, "TCP port");
    serve->callback([&] { serve_requested = true; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (serve_requested) {
      triauth::tool::Service service(globals.workspace, globals.seed,
                                     globals.now);
      std::fprintf(stderr, "listening on %s:%d\n", serve_host.c_str(),
                   serve_port);
      return service.run(serve_host, serve_port) ? 0 : 1;
    }
    auto result = action();
    print_result(globals, result);
    return result.ok ? 0 : 1;
  } catch (const Error& e) {
    ordered_json body;
    body["error"] = std::string(triauth::errc_name(e.code()));
    body["detail"] = e.what();
    std::fprintf(stderr, "%s\n", body.dump().c_str());
    return e.code() == errc::corrupt_workspace ? 3 : 1;
  } catch (const std::exception& e) {
    ordered_json body;
    body["error"] = "internal";
    body["detail"] = e.what();
    std::fprintf(stderr, "%s\n", body.dump().c_str());
    return 1;
  }
}
