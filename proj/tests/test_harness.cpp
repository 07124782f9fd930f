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

#include "triauth/error.hpp"
#include "triauth/harness.hpp"

using namespace triauth;
using namespace triauth::harness;

namespace {

const std::vector<std::string> kCriteria = {
    "trust",    "revocation",     "privacy",        "security",
    "validity", "verification",   "authentication", "functionality"};
const std::vector<std::string> kMechanisms = {"scitokens", "vc", "contract"};

}  // namespace

TEST_CASE("scenario catalog is complete and criterion-major") {
  const auto& names = scenario_names();
  REQUIRE(names.size() == 24);
  std::size_t i = 0;
  for (const auto& criterion : kCriteria) {
    for (const auto& mechanism : kMechanisms) {
      CHECK(names[i] == criterion + "/" + mechanism);
      ++i;
    }
  }
  CHECK(expected_fixtures().size() == 24);
  for (const auto& name : names) CHECK(expected_fixtures().count(name) == 1);
}

TEST_CASE("every cell matches its fixture") {
  auto matrix = run_matrix();
  REQUIRE(matrix.cells.size() == 24);
  CHECK(matrix.all_match());
  for (const auto& cell : matrix.cells) {
    CAPTURE(cell.name);
    CAPTURE(cell.observed);
    CHECK(cell.matches_expected);
    CHECK(cell.observed == cell.expected);
    CHECK_FALSE(cell.observed.empty());
  }
}

TEST_CASE("single scenarios run standalone") {
  auto cell = run_scenario("revocation/scitokens");
  CHECK(cell.criterion == "revocation");
  CHECK(cell.mechanism == "scitokens");
  CHECK(cell.matches_expected);
  CHECK_THROWS_AS(run_scenario("no/such"), Error);
}

TEST_CASE("consecutive runs are byte-identical") {
  auto first = run_matrix();
  auto second = run_matrix();
  CHECK(first.to_json() == second.to_json());
  CHECK(first.to_text() == second.to_text());
}

TEST_CASE("matrix json document shape") {
  auto matrix = run_matrix();
  auto doc = nlohmann::ordered_json::parse(matrix.to_json());
  CHECK(doc["format"] == "triauth.matrix");
  CHECK(doc["version"] == 1);
  CHECK(doc["t0"] == kT0);
  CHECK(doc["all_match"] == true);
  REQUIRE(doc["cells"].is_array());
  CHECK(doc["cells"].size() == 24);
  for (const auto& cell : doc["cells"]) {
    CHECK(cell.contains("name"));
    CHECK(cell.contains("criterion"));
    CHECK(cell.contains("mechanism"));
    CHECK(cell.contains("expected"));
    CHECK(cell.contains("observed"));
    CHECK(cell["matches_expected"] == true);
  }
  REQUIRE(doc["non_executable"].is_array());
  std::set<std::string> rows;
  for (const auto& row : doc["non_executable"])
    rows.insert(row["criterion"].get<std::string>());
  CHECK(rows == std::set<std::string>{"scalability", "interoperability",
                                      "ease of integration",
                                      "credential management"});
}

TEST_CASE("matrix text table is aligned and summarized") {
  auto matrix = run_matrix();
  auto text = matrix.to_text();
  CHECK(text.find("trust") != std::string::npos);
  CHECK(text.find("functionality") != std::string::npos);
  CHECK(text.find("scitokens") != std::string::npos);
  CHECK(text.find("contract") != std::string::npos);
  CHECK(text.find("scalability") != std::string::npos);
  auto tail = text.substr(text.size() - std::string("24/24 cells match\n")
                                            .size());
  CHECK(tail == "24/24 cells match\n");
}

TEST_CASE("a planted wrong fixture is detected end to end") {
  std::map<std::string, std::string> overrides{
      {"privacy/vc", "disclosed=everything"}};
  auto matrix = run_matrix(overrides);
  CHECK_FALSE(matrix.all_match());
  int mismatches = 0;
  for (const auto& cell : matrix.cells) {
    if (!cell.matches_expected) {
      ++mismatches;
      CHECK(cell.name == "privacy/vc");
      CHECK(cell.expected == "disclosed=everything");
      CHECK(cell.observed != cell.expected);
    }
  }
  CHECK(mismatches == 1);
  auto doc = nlohmann::ordered_json::parse(matrix.to_json());
  CHECK(doc["all_match"] == false);
  auto text = matrix.to_text();
  CHECK(text.find("23/24 cells match") != std::string::npos);
}

TEST_CASE("observed strings stay within the check=value grammar") {
  auto matrix = run_matrix();
  for (const auto& cell : matrix.cells) {
    CAPTURE(cell.name);
    for (const auto& part : [&] {
           std::vector<std::string> parts;
           std::string rest = cell.observed;
           std::size_t pos;
           while ((pos = rest.find(';')) != std::string::npos) {
             parts.push_back(rest.substr(0, pos));
             rest = rest.substr(pos + 1);
           }
           parts.push_back(rest);
           return parts;
         }()) {
      CAPTURE(part);
      auto eq = part.find('=');
      CHECK(eq != std::string::npos);
      CHECK(eq > 0);
      CHECK(eq + 1 < part.size());
    }
  }
}
