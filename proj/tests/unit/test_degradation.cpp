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
#include <cmath>
#include <random>

#include "resel/degradation.hpp"
#include "test_util.hpp"

namespace resel {
namespace {

using test::KindOf;

// Independent evaluation: JSD = H(M) - (H(P) + H(Q)) / 2 in long double.
double EntropyJsd(const std::vector<double>& p, const std::vector<double>& q) {
  const auto h = [](long double x) { return x > 0 ? -x * std::log2(x) : 0.0L; };
  long double out = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double m = (static_cast<long double>(p[i]) + q[i]) / 2;
    out += h(m) - (h(p[i]) + h(q[i])) / 2;
  }
  return static_cast<double>(out);
}

std::vector<double> RandomDistribution(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex;
  std::vector<double> v(n);
  double sum = 0;
  for (double& x : v) sum += (x = ex(rng));
  for (double& x : v) x /= sum;
  return v;
}

TEST_CASE("softmax with temperature") {
  const std::vector<double> zero = {0.0, 0.0};
  const auto half = SoftmaxWithTemperature(zero);
  CHECK(half[0] == 0.5);
  CHECK(half[1] == 0.5);
  const std::vector<double> l2 = {std::log(2.0), 0.0};
  const auto p = SoftmaxWithTemperature(l2);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> logits(1 + trial % 17);
    for (double& x : logits) x = nd(rng);
    for (double tau : {0.05, 1.0, 3.0, 100.0}) {
      const auto s = SoftmaxWithTemperature(logits, tau);
      double sum = 0;
      for (double x : s) sum += x;
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      CHECK(std::max_element(s.begin(), s.end()) - s.begin() ==
            std::max_element(logits.begin(), logits.end()) - logits.begin());
    }
  }
  // Large logits do not overflow.
  const std::vector<double> big = {1000.0, 999.0};
  CHECK(SoftmaxWithTemperature(big)[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(KindOf([] { SoftmaxWithTemperature(std::vector<double>{}); }).has_value());
  CHECK(KindOf([&] { SoftmaxWithTemperature(zero, 0.0); }).has_value());
}

TEST_CASE("KL divergence") {
  const std::vector<double> p = {1.0, 0.0};
  const std::vector<double> u = {0.5, 0.5};
  CHECK(KlDivergence(u, u) == 0.0);
  CHECK(KlDivergence(p, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(KindOf([&] { KlDivergence(u, p); }).has_value());
  const std::vector<double> three = {0.2, 0.3, 0.5};
  CHECK(KindOf([&] { KlDivergence(u, three); }).has_value());
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto a = RandomDistribution(8, rng);
    const auto b = RandomDistribution(8, rng);
    CHECK(KlDivergence(a, b) >= 0.0);
  }
}

TEST_CASE("Jensen-Shannon fixtures") {
  const std::vector<double> half = {0.5, 0.5};
  const std::vector<double> one = {1.0, 0.0};
  const std::vector<double> other = {0.0, 1.0};
  CHECK(JensenShannon(half, half) == 0.0);
  CHECK(JensenShannon(one, other) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(JensenShannon(half, one) == doctest::Approx(0.31128).epsilon(1e-4));
  // Components through the mixture M = [0.75, 0.25].
  const std::vector<double> m = {0.75, 0.25};
  CHECK(KlDivergence(half, m) == doctest::Approx(0.20752).epsilon(1e-4));
  CHECK(KlDivergence(one, m) == doctest::Approx(0.41504).epsilon(1e-4));
  CHECK(JensenShannon(half, one) ==
        doctest::Approx(EntropyJsd(half, one)).epsilon(1e-13));
  const std::vector<double> three = {0.2, 0.3, 0.5};
  CHECK(KindOf([&] { JensenShannon(half, three); }).has_value());
}

TEST_CASE("Jensen-Shannon properties against the entropy oracle") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {2u, 8u, 64u}) {
    for (int i = 0; i < 200; ++i) {
      auto p = RandomDistribution(n, rng);
      auto q = RandomDistribution(n, rng);
      if (i % 5 == 0) {
        p[0] += p[1];
        p[1] = 0.0;  // zeros on one side
      }
      const double a = JensenShannon(p, q);
      CHECK(a == JensenShannon(q, p));
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      CHECK(a == doctest::Approx(EntropyJsd(p, q)).epsilon(1e-10));
      CHECK(JensenShannon(p, p) == 0.0);
    }
  }
}

TEST_CASE("sample divergence") {
  DivergenceRecord same;
  same.id = "s";
  same.x_tokens = 1;
  same.y_tokens = 2;
  same.form = DivergenceForm::kProbabilities;
  same.token_pairs = {{{0.3, 0.7}, {0.3, 0.7}}, {{1.0, 0.0}, {1.0, 0.0}}};
  CHECK(ComputeSampleDivergence(same).mean == 0.0);

  DivergenceRecord extremes = same;
  extremes.token_pairs = {{{0.5, 0.5}, {0.5, 0.5}}, {{1.0, 0.0}, {0.0, 1.0}}};
  const SampleDivergence e = ComputeSampleDivergence(extremes);
  CHECK(e.id == "s");
  CHECK(e.per_token.size() == 2);
  CHECK(e.mean == doctest::Approx(0.5).epsilon(1e-15));

  // Same record pre-reduced to per-token JSD.
  std::mt19937_64 rng(4);
  DivergenceRecord pairs = same;
  pairs.y_tokens = 7;
  pairs.token_pairs.clear();
  for (int m = 0; m < 7; ++m) {
    pairs.token_pairs.push_back({RandomDistribution(5, rng), RandomDistribution(5, rng)});
  }
  DivergenceRecord reduced = pairs;
  reduced.form = DivergenceForm::kPerTokenJsd;
  reduced.token_pairs.clear();
  for (const TokenPair& t : pairs.token_pairs) {
    reduced.per_token_jsd.push_back(EntropyJsd(t.pruned, t.original));
  }
  CHECK(ComputeSampleDivergence(pairs).mean ==
        doctest::Approx(ComputeSampleDivergence(reduced).mean).epsilon(1e-9));

  // Token order does not matter beyond rounding.
  DivergenceRecord shuffled = pairs;
  std::reverse(shuffled.token_pairs.begin(), shuffled.token_pairs.end());
  CHECK(ComputeSampleDivergence(shuffled).mean ==
        doctest::Approx(ComputeSampleDivergence(pairs).mean).epsilon(1e-14));

  // Logits go through the tempered softmax.
  DivergenceRecord logits = same;
  logits.y_tokens = 1;
  logits.form = DivergenceForm::kLogits;
  logits.token_pairs = {{{std::log(2.0), 0.0}, {0.0, 0.0}}};
  const std::vector<double> p = {2.0 / 3.0, 1.0 / 3.0};
  const std::vector<double> q = {0.5, 0.5};
  CHECK(ComputeSampleDivergence(logits, 1.0).mean ==
        doctest::Approx(EntropyJsd(p, q)).epsilon(1e-12));
  const std::vector<double> p2 = SoftmaxWithTemperature(std::vector<double>{std::log(2.0), 0.0}, 2.0);
  CHECK(ComputeSampleDivergence(logits, 2.0).mean ==
        doctest::Approx(EntropyJsd(p2, q)).epsilon(1e-12));

  DivergenceRecord empty = same;
  empty.form = DivergenceForm::kPerTokenJsd;
  empty.token_pairs.clear();
  CHECK(KindOf([&] { ComputeSampleDivergence(empty); }).has_value());
}

TEST_CASE("cluster CDS") {
  const Clustering c = ClusteringFromLabels({0, 1, 0, 1, 1});
  std::vector<SampleDivergence> d(5);
  const double means[] = {0.2, 0.1, 0.2, 0.3, 0.2};
  for (int i = 0; i < 5; ++i) d[i].mean = means[i];
  const auto cds = ComputeClusterCds(c, d);
  REQUIRE(cds.size() == 2);
  CHECK(cds[0].cluster == 0);
  CHECK(cds[0].size == 2);
  CHECK(cds[0].cds == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(cds[1].cds == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(cds[1].size == 3);
  for (const auto& k : cds) {
    CHECK(k.cds >= 0.0);
    CHECK(k.cds <= 1.0);
  }
  std::vector<SampleDivergence> short_list(3);
  CHECK(KindOf([&] { ComputeClusterCds(c, short_list); }).has_value());
}

TEST_CASE("computational cost and efficiency") {
  CHECK(ComputationalCost(3, 7) == 100u);
  CHECK(ComputationalCost(1, 1) == 4u);
  CHECK(KindOf([] { ComputationalCost(0, 1); }).has_value());

  InstructionSample s{"a", "x", "y", 4, 6, std::nullopt};
  SampleDivergence d{"a", {0.5}, 0.5};
  const EfficiencyScore e = ComputeEfficiency(d, s);
  CHECK(e.cost == 100u);
  CHECK(e.mean_jsd == 0.5);
  CHECK(e.ies == doctest::Approx(0.5 / std::log(100.0)).epsilon(1e-15));
  CHECK(e.ies == doctest::Approx(0.10857).epsilon(1e-4));

  d.mean = 0.0;
  CHECK(ComputeEfficiency(d, s).ies == 0.0);

  d.mean = 0.3;
  double previous = 1e300;
  for (std::int64_t y = 1; y < 60; ++y) {
    s.y_tokens = y;
    const double ies = ComputeEfficiency(d, s).ies;
    CHECK(ies < previous);
    previous = ies;
  }
}

}  // namespace
}  // namespace resel
