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

// Capability degradation scoring.
//
// Divergences use base-2 logarithms so that JSD lies in [0, 1]. The
// efficiency score divides a sample's mean JSD by the natural log of its
// quadratic training cost (|x| + |y|)^2.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resel/cluster.hpp"
#include "resel/corpus.hpp"

namespace resel {

// Numerically stable softmax of logits / tau.
std::vector<double> SoftmaxWithTemperature(std::span<const double> logits,
                                           double tau = 1.0);

// sum_i p_i log2(p_i / q_i), with 0 log(0/q) = 0. Throws when p_i > 0 = q_i.
double KlDivergence(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence through the mixture (P + Q) / 2. Exactly
// symmetric and clamped into [0, 1].
double JensenShannon(std::span<const double> p, std::span<const double> q);

struct SampleDivergence {
  std::string id;
  std::vector<double> per_token;
  double mean = 0.0;
};

// Per-token JSD and its mean. Logit records go through the softmax first;
// per-token logs pass through unchanged.
SampleDivergence ComputeSampleDivergence(const DivergenceRecord& record,
                                         double tau = 1.0);

struct ClusterCds {
  int cluster = 0;  // 0-based
  double cds = 0.0;
  std::size_t size = 0;
};

// Mean of member sample divergences per cluster, reduced in member order.
// `divergences` is indexed by corpus position.
std::vector<ClusterCds> ComputeClusterCds(
    const Clustering& clustering, std::span<const SampleDivergence> divergences);

// (x_tokens + y_tokens)^2. Requires x_tokens + y_tokens >= 2.
std::uint64_t ComputationalCost(std::int64_t x_tokens, std::int64_t y_tokens);

struct EfficiencyScore {
  std::string id;
  double mean_jsd = 0.0;
  std::uint64_t cost = 0;
  double ies = 0.0;
};

EfficiencyScore ComputeEfficiency(const SampleDivergence& divergence,
                                  const InstructionSample& sample);

}  // namespace resel
