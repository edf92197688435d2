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

// Synthetic inputs with known ground truth, and a slow replay of the
// selection loop used to cross-check the selector.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resel/corpus.hpp"
#include "resel/manifest.hpp"
#include "resel/selector.hpp"

namespace resel::testkit {

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::size_t k_true = 3;
  std::size_t points_per_cluster = 50;
  std::size_t dim = 8;
  double center_spread = 10.0;
  double intra_spread = 1.0;
  // Target mean JSD per blob; missing entries default to 0.
  std::vector<double> target_divergence;
  std::size_t vocab_size = 8;  // even, >= 2
  std::int64_t min_tokens = 2;
  std::int64_t max_tokens = 24;
};

// Throws Error(kConfig) on an invalid spec.
void ValidateSpec(const SyntheticSpec& spec);

struct Blobs {
  EmbeddingSet embeddings;
  std::vector<int> labels;  // 0-based blob of each row
  Eigen::MatrixXd centers;  // k_true x dim
};

// Centers ~ N(0, center_spread^2 I), points ~ N(center, intra_spread^2 I).
// Rows are grouped by blob.
Blobs GenBlobs(const SyntheticSpec& spec);

// One concept-free sample per label with whitespace-token texts whose
// lengths are the recorded token counts.
Corpus GenCorpus(const SyntheticSpec& spec, std::span<const int> labels);

struct SyntheticDivergences {
  std::vector<DivergenceRecord> pairs;      // probability form
  std::vector<DivergenceRecord> per_token;  // same records as per-token JSD
};

// Each token pairs a distribution P on the lower half of the vocabulary with
// Q = (1 - a) P + a P', where P' is P moved onto the upper half. JSD(P, Q)
// depends on a only, and a is solved per blob so that every token hits the
// blob's target. Throws Error(kConfig) for targets outside [0, 1].
SyntheticDivergences GenDivergences(const SyntheticSpec& spec,
                                    const Corpus& corpus,
                                    std::span<const int> labels);

// Mixing weight a with JSD(P, (1 - a) P + a P') = target.
double MixingForTarget(double target);

double AdjustedRandIndex(std::span<const int> a, std::span<const int> b);

// Small random selection instance: up to max_n samples, 1 to 4 clusters,
// tied IES values, overlapping fuzzy concept vocabularies and an optional
// cost budget.
SelectionProblem RandomSelectionInstance(std::uint64_t seed,
                                         std::size_t max_n = 30);

// Unoptimized replay of the selection loop with its own consistency graph,
// which starts out holding the `prior` concept sets. Throws Error(kConfig)
// for more than 30 samples.
SelectionManifest OracleSelect(
    const SelectionProblem& problem,
    std::span<const std::vector<std::string>> prior = {});

}  // namespace resel::testkit
