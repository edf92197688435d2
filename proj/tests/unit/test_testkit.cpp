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

#include <sstream>

#include "resel/degradation.hpp"
#include "resel/testkit.hpp"
#include "test_util.hpp"

namespace resel {
namespace {

using test::KindOf;
namespace tk = testkit;

std::size_t WordCount(const std::string& s) {
  std::istringstream in(s);
  std::string w;
  std::size_t n = 0;
  while (in >> w) ++n;
  return n;
}

TEST_CASE("blobs: sizes, labels and nearest-center guarantee") {
  tk::SyntheticSpec spec;
  spec.seed = 17;
  const tk::Blobs b = tk::GenBlobs(spec);
  REQUIRE(b.embeddings.size() == 150);
  CHECK(b.embeddings.dim() == 8);
  CHECK(b.centers.rows() == 3);
  for (std::size_t i = 0; i < 150; ++i) {
    CHECK(b.labels[i] == static_cast<int>(i / 50));
    Eigen::Index nearest = 0;
    (b.centers.rowwise() - b.embeddings.vectors.row(static_cast<Eigen::Index>(i)))
        .rowwise()
        .squaredNorm()
        .minCoeff(&nearest);
    CHECK(nearest == b.labels[i]);
  }
  CHECK(tk::GenBlobs(spec).embeddings == b.embeddings);
  spec.seed = 18;
  CHECK_FALSE(tk::GenBlobs(spec).embeddings == b.embeddings);

  tk::SyntheticSpec single;
  single.k_true = 1;
  const tk::Blobs one = tk::GenBlobs(single);
  for (int l : one.labels) CHECK(l == 0);
}

TEST_CASE("spec validation") {
  tk::SyntheticSpec s;
  s.k_true = 0;
  CHECK(KindOf([&] { tk::ValidateSpec(s); }) == ErrorKind::kConfig);
  s = {};
  s.intra_spread = 0.0;
  CHECK(KindOf([&] { tk::ValidateSpec(s); }) == ErrorKind::kConfig);
  s = {};
  s.vocab_size = 7;
  CHECK(KindOf([&] { tk::ValidateSpec(s); }) == ErrorKind::kConfig);
  s = {};
  s.target_divergence = {0.5, 1.5};
  CHECK(KindOf([&] { tk::ValidateSpec(s); }) == ErrorKind::kConfig);
}

TEST_CASE("synthetic corpus is concept-free with consistent token counts") {
  tk::SyntheticSpec spec;
  const tk::Blobs b = tk::GenBlobs(spec);
  const Corpus c = tk::GenCorpus(spec, b.labels);
  REQUIRE(c.size() == 150);
  for (const InstructionSample& s : c.samples()) {
    REQUIRE(s.concepts.has_value());
    CHECK(s.concepts->empty());
    CHECK(WordCount(s.instruction) == static_cast<std::size_t>(s.x_tokens));
    CHECK(WordCount(s.output) == static_cast<std::size_t>(s.y_tokens));
    CHECK(s.y_tokens >= 1);
  }
  CHECK(c[0].id == "s0000");
}

TEST_CASE("mixing weight hits the requested JSD") {
  CHECK(tk::MixingForTarget(0.0) == 0.0);
  CHECK(tk::MixingForTarget(1.0) == 1.0);
  const std::vector<double> p = {0.1, 0.6, 0.3, 0.0, 0.0, 0.0};
  const std::vector<double> shifted = {0.0, 0.0, 0.0, 0.1, 0.6, 0.3};
  for (double target : {0.01, 0.1, 0.31128, 0.5, 0.9}) {
    const double a = tk::MixingForTarget(target);
    std::vector<double> q(6);
    for (int i = 0; i < 6; ++i) q[i] = (1.0 - a) * p[i] + a * shifted[i];
    CHECK(JensenShannon(p, q) == doctest::Approx(target).epsilon(1e-10));
  }
  CHECK(KindOf([] { tk::MixingForTarget(1.5); }) == ErrorKind::kConfig);
}

TEST_CASE("synthetic divergences") {
  tk::SyntheticSpec spec;
  spec.seed = 3;
  spec.target_divergence = {0.0, 1.0, 0.3};
  const tk::Blobs b = tk::GenBlobs(spec);
  const Corpus c = tk::GenCorpus(spec, b.labels);
  const tk::SyntheticDivergences d = tk::GenDivergences(spec, c, b.labels);
  REQUIRE(d.pairs.size() == 150);
  REQUIRE(d.per_token.size() == 150);
  for (std::size_t i = 0; i < 150; ++i) {
    const DivergenceRecord& pr = d.pairs[i];
    CHECK(pr.id == c[i].id);
    CHECK(pr.y_tokens == c[i].y_tokens);
    CHECK(pr.token_pairs.size() == static_cast<std::size_t>(pr.y_tokens));
    const double a = ComputeSampleDivergence(pr).mean;
    const double f = ComputeSampleDivergence(d.per_token[i]).mean;
    CHECK(a == doctest::Approx(f).epsilon(1e-9));
    const double target = spec.target_divergence[static_cast<std::size_t>(b.labels[i])];
    CHECK(a == doctest::Approx(target).epsilon(1e-9));
    if (b.labels[i] == 0) {
      for (const TokenPair& t : pr.token_pairs) CHECK(t.pruned == t.original);
      CHECK(a == 0.0);
    }
  }
}

TEST_CASE("higher target gives higher realized CDS") {
  tk::SyntheticSpec spec;
  spec.k_true = 2;
  spec.points_per_cluster = 60;
  spec.target_divergence = {0.1, 0.5};
  const tk::Blobs b = tk::GenBlobs(spec);
  const Corpus c = tk::GenCorpus(spec, b.labels);
  const tk::SyntheticDivergences d = tk::GenDivergences(spec, c, b.labels);
  std::vector<SampleDivergence> s;
  for (const auto& r : d.pairs) s.push_back(ComputeSampleDivergence(r));
  const auto cds = ComputeClusterCds(ClusteringFromLabels(b.labels), s);
  CHECK(cds[1].cds > cds[0].cds);
}

TEST_CASE("adjusted Rand index") {
  const std::vector<int> a = {0, 0, 0, 1, 1, 1};
  const std::vector<int> b = {0, 0, 1, 1, 2, 2};
  CHECK(tk::AdjustedRandIndex(a, b) == doctest::Approx(0.8 / 3.3).epsilon(1e-12));
  CHECK(tk::AdjustedRandIndex(a, a) == 1.0);
  const std::vector<int> renamed = {7, 7, 7, 2, 2, 2};
  CHECK(tk::AdjustedRandIndex(a, renamed) == 1.0);
  CHECK(tk::AdjustedRandIndex(a, b) == tk::AdjustedRandIndex(b, a));
}

TEST_CASE("random selection instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SelectionProblem p = tk::RandomSelectionInstance(seed);
    CHECK(p.candidates.size() >= 2);
    CHECK(p.candidates.size() <= 30);
    CHECK(p.budget >= 1);
    CHECK(p.budget < p.candidates.size());
    const SelectionProblem again = tk::RandomSelectionInstance(seed);
    CHECK(again.candidates.size() == p.candidates.size());
    CHECK(again.allocation == p.allocation);
  }
}

TEST_CASE("oracle replay") {
  // Concept-free instance: top allocation by IES per cluster.
  SelectionProblem p;
  p.candidates = {{"a", 0, 0.3, 4, {}}, {"b", 0, 0.9, 4, {}}, {"c", 0, 0.5, 4, {}}};
  p.cds = {0.2};
  p.allocation = {2};
  p.budget = 2;
  CHECK(tk::OracleSelect(p).selected == std::vector<std::string>{"b", "c"});

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SelectionProblem q = tk::RandomSelectionInstance(seed);
    CHECK(SerializeManifest(tk::OracleSelect(q)) == SerializeManifest(GreedySelect(q)));
  }

  SelectionProblem big = p;
  big.candidates.assign(31, {"x", 0, 0.1, 4, {}});
  CHECK(KindOf([&] { tk::OracleSelect(big); }) == ErrorKind::kConfig);
}

}  // namespace
}  // namespace resel
