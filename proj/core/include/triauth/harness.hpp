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
#include <string>
#include <vector>

namespace triauth::harness {

// Fixed epoch every scenario clock starts from.
inline constexpr std::int64_t kT0 = 1700000000;

// Scenario names are "<criterion>/<mechanism>"; criteria are trust,
// revocation, privacy, security, validity, verification, authentication,
// functionality; mechanisms are scitokens, vc, contract. Every scenario owns
// its environment (keys, registries, ledgers) and draws all randomness from
// a per-scenario seed, so results are byte-stable across runs and
// independent of execution order.

struct ScenarioResult {
  std::string name;
  std::string criterion;
  std::string mechanism;
  std::string expected;  // semicolon-joined check=value pairs
  std::string observed;
  bool matches_expected = false;
};

struct NonExecutableRow {
  std::string criterion;
  std::string note;
};

struct ComparisonMatrix {
  std::vector<ScenarioResult> cells;  // criterion-major, fixed order
  std::vector<NonExecutableRow> non_executable;

  bool all_match() const;
  std::string to_json() const;  // {"format":"triauth.matrix","version":1,...}
  std::string to_text() const;  // aligned table plus the summary line
};

// All 24 names in matrix order.
const std::vector<std::string>& scenario_names();

// Expected strings keyed by scenario name, reviewed against the behavior
// each row is meant to pin down.
const std::map<std::string, std::string>& expected_fixtures();

// Runs one scenario against its fixture. Throws scenario_panic when the
// toolkit throws somewhere the script expected a value.
ScenarioResult run_scenario(const std::string& name);

ComparisonMatrix run_matrix();

// Sensitivity hook: replaces the fixture for the named scenarios, so a
// deliberate mismatch is observable end to end.
ComparisonMatrix run_matrix(
    const std::map<std::string, std::string>& expected_override);

}  // namespace triauth::harness
