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

#include <algorithm>
#include <random>

#include "resel/selector.hpp"
#include "resel/testkit.hpp"
#include "test_util.hpp"

namespace resel {
namespace {

using Sizes = std::vector<std::size_t>;
using test::KindOf;

Sizes Alloc(std::vector<double> cds, Sizes sizes, std::size_t b) {
  return AllocateBudget(cds, sizes, b).per_cluster;
}

TEST_CASE("allocation fixtures") {
  CHECK(Alloc({0.2, 0.2, 0.2, 0.2}, {10, 10, 10, 10}, 8) == Sizes{2, 2, 2, 2});
  CHECK(Alloc({0.3, 0.1}, {50, 50}, 10) == Sizes{8, 2});
  CHECK(Alloc({0.5, 0.5}, {3, 100}, 10) == Sizes{3, 7});
  // Floors [1, 1, 1], remainders tie three ways: lowest indices win.
  CHECK(Alloc({1.0, 1.0, 1.0}, {9, 9, 9}, 5) == Sizes{2, 2, 1});
  // Zero-CDS clusters still get nothing when others degrade.
  CHECK(Alloc({0.0, 0.4}, {20, 20}, 6) == Sizes{0, 6});
  // Cap cascades through several clusters.
  CHECK(Alloc({0.6, 0.3, 0.1}, {1, 2, 40}, 12) == Sizes{1, 2, 9});
}

TEST_CASE("zero total CDS falls back to cluster sizes") {
  const BudgetAllocation a = AllocateBudget(std::vector<double>{0.0, 0.0}, Sizes{30, 10}, 8);
  CHECK(a.size_weighted);
  CHECK(a.per_cluster == Sizes{6, 2});
  CHECK_FALSE(a.log.empty());
}

TEST_CASE("allocation errors") {
  CHECK(KindOf([] { Alloc({0.1, 0.2}, {3, 3}, 6); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { Alloc({0.1, 0.2}, {3, 3}, 0); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { Alloc({0.1}, {3, 3}, 2); }).has_value());
  CHECK(KindOf([] { Alloc({-0.1, 0.2}, {3, 3}, 2); }).has_value());
}

TEST_CASE("allocation scale invariance and totals on fuzzed instances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng() % 8;
    std::vector<double> cds(k);
    Sizes sizes(k);
    std::size_t n = 0;
    for (std::size_t c = 0; c < k; ++c) {
      cds[c] = (rng() % 4 == 0) ? 0.0 : static_cast<double>(rng() % 1000) / 1000.0;
      sizes[c] = 1 + rng() % 30;
      n += sizes[c];
    }
    if (n < 2) continue;
    const std::size_t b = 1 + rng() % (n - 1);
    const BudgetAllocation a = AllocateBudget(cds, sizes, b);
    std::size_t total = 0;
    for (std::size_t c = 0; c < k; ++c) {
      CHECK(a.per_cluster[c] <= sizes[c]);
      total += a.per_cluster[c];
    }
    CHECK(total == b);
    CHECK(a.total == b);
    for (double scale : {3.0, 0.001, 1.0 / 3.0, 1e6}) {
      std::vector<double> scaled = cds;
      for (double& x : scaled) x *= scale;
      CHECK(AllocateBudget(scaled, sizes, b).per_cluster == a.per_cluster);
    }
  }
}

TEST_CASE("cluster order") {
  CHECK(OrderClusters(std::vector<double>{0.1, 0.4, 0.2}) == Sizes{1, 2, 0});
  CHECK(OrderClusters(std::vector<double>{0.3, 0.3, 0.3}) == Sizes{0, 1, 2});
  CHECK(OrderClusters(std::vector<double>{0.9}) == Sizes{0});
}

Candidate Cand(const std::string& id, int cluster, double ies, std::uint64_t cost = 4,
               std::vector<std::string> concepts = {}) {
  return {id, cluster, ies, cost, std::move(concepts)};
}

SelectionProblem Problem(std::vector<Candidate> c, std::vector<double> cds, Sizes alloc) {
  SelectionProblem p;
  p.candidates = std::move(c);
  p.cds = std::move(cds);
  p.allocation = std::move(alloc);
  p.budget = 0;
  for (std::size_t a : p.allocation) p.budget += a;
  p.config_fingerprint = "test";
  return p;
}

TEST_CASE("concept-free selection takes the top IES per cluster") {
  const SelectionProblem p = Problem(
      {Cand("a", 0, 0.1), Cand("b", 1, 0.9), Cand("c", 0, 0.5), Cand("d", 1, 0.2),
       Cand("e", 0, 0.5), Cand("f", 1, 0.7), Cand("g", 0, 0.3)},
      {0.2, 0.4}, {2, 1});
  const SelectionManifest m = GreedySelect(p);
  // Cluster 2 (higher CDS) first; the tie between c and e goes to c.
  CHECK(m.selected == std::vector<std::string>{"b", "c", "e"});
  REQUIRE(m.clusters.size() == 2);
  CHECK(m.clusters[0].cluster == 2);
  CHECK(m.clusters[0].realized == 1);
  CHECK(m.clusters[1].realized == 2);
  CHECK(m.records.size() == 7);
  CHECK(m.cumulative_cost == 12);
  std::size_t unvisited = 0;
  for (const SampleRecord& r : m.records) {
    if (r.decision == Decision::kClusterBudget) ++unvisited;
  }
  CHECK(unvisited == 4);
}

TEST_CASE("conflict against an earlier acceptance is skipped") {
  // Five samples ranked by IES; rank 2 pairs rank 1's concept with a vertex
  // it has never co-occurred with.
  SelectionProblem p = Problem(
      {Cand("r3", 0, 0.6), Cand("r1", 0, 0.9, 4, {"alpha beta"}),
       Cand("r5", 0, 0.2), Cand("r2", 0, 0.8, 4, {"alpha beta", "gamma delta"}),
       Cand("r4", 0, 0.4)},
      {0.5}, {3});
  const std::vector<std::vector<std::string>> prior = {{"gamma delta", "epsilon zeta"}};
  ConceptGraph g(p.theta);
  for (const auto& s : prior) g.Insert(s);
  const SelectionManifest m = GreedySelect(p, &g);
  CHECK(m.selected == std::vector<std::string>{"r1", "r3", "r4"});
  const auto r2 = std::find_if(m.records.begin(), m.records.end(),
                               [](const SampleRecord& r) { return r.id == "r2"; });
  REQUIRE(r2 != m.records.end());
  CHECK(r2->decision == Decision::kInconsistent);
  CHECK(r2->conflict == std::vector<std::string>{"alpha beta", "gamma delta"});
  CHECK(SerializeManifest(testkit::OracleSelect(p, prior)) == SerializeManifest(m));
  CHECK(g.HasEdge("alpha beta", "epsilon zeta") == false);
}

TEST_CASE("cost budget equal to the cheapest sample admits one sample") {
  SelectionProblem p = Problem(
      {Cand("a", 0, 0.9, 400), Cand("b", 0, 0.5, 25), Cand("c", 0, 0.7, 16),
       Cand("d", 1, 0.8, 36), Cand("e", 1, 0.1, 16)},
      {0.3, 0.2}, {2, 2});
  p.cost_budget = 16;
  const SelectionManifest m = GreedySelect(p);
  CHECK(m.selected == std::vector<std::string>{"c"});
  CHECK(m.cumulative_cost == 16);
  CHECK(SerializeManifest(testkit::OracleSelect(p)) == SerializeManifest(m));
}

TEST_CASE("IES rescaling leaves the selection unchanged") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SelectionProblem p = testkit::RandomSelectionInstance(seed);
    const auto base = GreedySelect(p).selected;
    for (Candidate& c : p.candidates) c.ies *= 2.0 / std::log(2.0);
    CHECK(GreedySelect(p).selected == base);
  }
}

TEST_CASE("budget safety and determinism on random instances") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SelectionProblem p = testkit::RandomSelectionInstance(seed);
    const SelectionManifest m = GreedySelect(p);
    CHECK(m.selected.size() <= p.budget);
    if (p.cost_budget) CHECK(m.cumulative_cost <= *p.cost_budget);
    CHECK(m.records.size() == p.candidates.size());
    std::size_t realized = 0;
    for (const ClusterRecord& c : m.clusters) {
      CHECK(c.realized <= c.allocated);
      realized += c.realized;
    }
    CHECK(realized == m.selected.size());
    CHECK(SerializeManifest(GreedySelect(p)) == SerializeManifest(m));
  }
}

}  // namespace
}  // namespace resel
