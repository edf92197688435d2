// Copyright 2026 The resel Authors.
//
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


#include <doctest.h>

#include "resel/manifest.hpp"
#include "test_util.hpp"

namespace resel {
namespace {

using test::KindOf;
using test::ReadFile;
using test::TempDir;

SelectionManifest Example() {
  SelectionManifest m;
  m.config_fingerprint = "fnv1a64:0123456789abcdef";
  m.seed = 42;
  m.budget = 3;
  m.cost_budget = 1000;
  m.selected = {"s2", "s0"};
  m.cumulative_cost = 125;
  m.clusters = {{2, 3, 1.0 / 3.0, 2, 2}, {1, 1, 0.1, 1, 0}};
  m.records = {
      {"s2", 2, 0.123456789012345, 100, Decision::kAccepted, {}},
      {"s0", 2, 0.1, 25, Decision::kAccepted, {}},
      {"s3", 2, 0.05, 49, Decision::kClusterBudget, {}},
      {"s1", 1, 0.2, 16, Decision::kInconsistent, {"deep learning", "quantum computing"}},
  };
  return m;
}

TEST_CASE("decision names") {
  for (Decision d : {Decision::kAccepted, Decision::kInconsistent, Decision::kCostBudget,
                     Decision::kClusterBudget}) {
    CHECK(ParseDecision(DecisionName(d)) == d);
  }
  CHECK(DecisionName(Decision::kCostBudget) == "cost_budget");
  CHECK_FALSE(ParseDecision("maybe").has_value());
}

TEST_CASE("manifest serialization is byte-stable and round-trips") {
  TempDir dir;
  const SelectionManifest m = Example();
  WriteManifest(m, dir / "a.json");
  WriteManifest(m, dir / "b.json");
  CHECK(ReadFile(dir / "a.json") == ReadFile(dir / "b.json"));
  CHECK(ReadManifest(dir / "a.json") == m);
  CHECK(SerializeManifest(ParseManifest(SerializeManifest(m))) == SerializeManifest(m));

  SelectionManifest unbounded = m;
  unbounded.cost_budget.reset();
  CHECK(ParseManifest(SerializeManifest(unbounded)) == unbounded);
}

TEST_CASE("empty selection serializes") {
  SelectionManifest m;
  m.budget = 1;
  const std::string text = SerializeManifest(m);
  CHECK(text.find("\"selected\": []") != std::string::npos);
  CHECK(ParseManifest(text) == m);
}

TEST_CASE("malformed manifests are input errors") {
  CHECK(KindOf([] { ParseManifest("{"); }) == ErrorKind::kInput);
  CHECK(KindOf([] { ParseManifest("[]"); }) == ErrorKind::kInput);
  std::string text = SerializeManifest(Example());
  const auto at = text.find("inconsistent");
  text.replace(at, 12, "unknownthing");
  CHECK(KindOf([&] { ParseManifest(text); }) == ErrorKind::kInput);
  TempDir dir;
  CHECK(KindOf([&] { ReadManifest(dir / "absent.json"); }) == ErrorKind::kInput);
}

}  // namespace
}  // namespace resel
