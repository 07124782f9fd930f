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
#include <mutex>
#include <optional>
#include <string>

#include <httplib.h>

#include "workspace.hpp"

namespace triauth::tool {

// JSON-over-HTTP face of the command layer. One workspace per process; the
// endpoints carry the exact bodies the CLI prints with --json, so the two
// surfaces can be diffed byte for byte. The service itself is unauthenticated
// by design: the mechanisms under test are the only access control, which
// bounds this to demo deployments.
class Service {
 public:
  Service(std::filesystem::path workspace_root,
          std::optional<std::string> seed, std::optional<std::int64_t> now);

  // Registers POST /token, POST /token/verify, POST /vc/verify,
  // POST /cert/verify and GET /healthz.
  void attach(httplib::Server& server);

  // Blocking listen on host:port with routes attached.
  bool run(const std::string& host, int port);

 private:
  std::mutex mutex_;  // single writer across all workspace mutations
  Workspace workspace_;
};

}  // namespace triauth::tool
