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

#include "service.hpp"

#include <functional>
#include <utility>

#include "commands.hpp"
#include "triauth/error.hpp"

namespace triauth::tool {

namespace {

using ordered_json = nlohmann::ordered_json;

void send_json(httplib::Response& res, int status,
               const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& error,
                const std::string& detail) {
  ordered_json body;
  body["error"] = error;
  body["detail"] = detail;
  send_json(res, status, body);
}

std::optional<std::string> opt_string(const ordered_json& doc,
                                      const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

// Parses the body and runs the handler, mapping outcomes onto the HTTP
// surface: 400 for bodies that do not parse into the expected shape, 422 for
// negative results, 500 for everything the workspace could not answer.
void handle(const httplib::Request& req, httplib::Response& res,
            const std::function<CommandResult(const ordered_json&)>& fn) {
  ordered_json body = ordered_json::parse(req.body, nullptr, false);
  if (!body.is_object()) {
    send_error(res, 400, "bad request", "body must be a JSON object");
    return;
  }
  try {
    auto result = fn(body);
    send_json(res, result.ok ? 200 : 422, result.body);
  } catch (const Error& e) {
    if (e.code() == errc::bad_encoding || e.code() == errc::usage ||
        e.code() == errc::malformed_token)
      send_error(res, 400, "bad request", e.what());
    else
      send_error(res, 500, std::string(errc_name(e.code())), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

[[noreturn]] void require(const char* what) {
  throw Error(errc::usage, std::string("missing or mistyped field: ") + what);
}

std::string need_string(const ordered_json& doc, const char* key) {
  auto v = opt_string(doc, key);
  if (!v) require(key);
  return *v;
}

}  // namespace

Service::Service(std::filesystem::path workspace_root,
                 std::optional<std::string> seed,
                 std::optional<std::int64_t> now)
    : workspace_(std::move(workspace_root), std::move(seed), now) {}

void Service::attach(httplib::Server& server) {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok\n", "text/plain");
  });

  server.Post("/token", [this](const httplib::Request& req,
                               httplib::Response& res) {
    handle(req, res, [this](const ordered_json& body) {
      auto sub = need_string(body, "sub");
      std::vector<std::string> scopes;
      auto it = body.find("scopes");
      if (it == body.end() || !it->is_array()) require("scopes");
      for (const auto& s : *it) {
        if (!s.is_string()) require("scopes");
        scopes.push_back(s.get<std::string>());
      }
      auto aud = opt_string(body, "aud");
      std::optional<std::int64_t> ttl;
      if (auto t = body.find("ttl"); t != body.end()) {
        if (!t->is_number_integer()) require("ttl");
        ttl = t->get<std::int64_t>();
      }
      std::scoped_lock lock(mutex_);
      return cmd_token_issue(workspace_, sub, scopes, aud, ttl);
    });
  });

  server.Post("/token/verify", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    handle(req, res, [this](const ordered_json& body) {
      auto token = need_string(body, "token");
      auto aud = opt_string(body, "aud");
      std::scoped_lock lock(mutex_);
      return cmd_token_verify(workspace_, token, aud);
    });
  });

  server.Post("/vc/verify", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    handle(req, res, [this](const ordered_json& body) {
      auto it = body.find("presentation");
      if (it == body.end()) require("presentation");
      std::string presentation =
          it->is_string() ? it->get<std::string>() : it->dump();
      auto challenge = need_string(body, "challenge");
      std::scoped_lock lock(mutex_);
      return cmd_vc_verify(workspace_, presentation, challenge);
    });
  });

  server.Post("/cert/verify", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    handle(req, res, [this](const ordered_json& body) {
      auto id = need_string(body, "certificate_id");
      auto name = need_string(body, "name");
      auto program = need_string(body, "program");
      auto graduation_date = need_string(body, "graduation_date");
      auto gpa = need_string(body, "gpa");
      auto channel = opt_string(body, "channel")
                         .value_or(std::string(ledger::kDefaultChannel));
      std::scoped_lock lock(mutex_);
      return cmd_cert_verify(workspace_, id, name, program, graduation_date,
                             gpa, channel);
    });
  });
}

bool Service::run(const std::string& host, int port) {
  httplib::Server server;
  attach(server);
  return server.listen(host, port);
}

}  // namespace triauth::tool
