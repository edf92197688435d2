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

#include "resel/degradation.hpp"

#include <algorithm>
#include <cmath>

#include "resel/error.hpp"

namespace resel {

namespace {

void RequireSameSupport(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    ThrowInput("distributions have different supports (" +
               std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
               ")");
  }
  if (p.empty()) ThrowInput("distributions are empty");
}

// p log2(p / m), zero when p is zero.
double RelativeTerm(double p, double m) {
  return p > 0.0 ? p * std::log2(p / m) : 0.0;
}

}  // namespace

std::vector<double> SoftmaxWithTemperature(std::span<const double> logits,
                                           double tau) {
  if (logits.empty()) ThrowInput("softmax of an empty vector");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    ThrowConfig("softmax temperature must be positive");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) ThrowInput("non-finite logit");
    out[i] = std::exp((logits[i] - top) / tau);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  RequireSameSupport(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      ThrowNumerical("KL divergence undefined: p > 0 where q = 0");
    }
    sum += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(0.0, sum);
}

double JensenShannon(std::span<const double> p, std::span<const double> q) {
  RequireSameSupport(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (m <= 0.0) continue;
    // Adding the two terms commutes, so swapping p and q is bit-identical.
    sum += 0.5 * (RelativeTerm(p[i], m) + RelativeTerm(q[i], m));
  }
  return std::clamp(sum, 0.0, 1.0);
}

SampleDivergence ComputeSampleDivergence(const DivergenceRecord& record,
                                         double tau) {
  SampleDivergence out;
  out.id = record.id;
  switch (record.form) {
    case DivergenceForm::kPerTokenJsd:
      out.per_token = record.per_token_jsd;
      break;
    case DivergenceForm::kProbabilities:
      out.per_token.reserve(record.token_pairs.size());
      for (const TokenPair& pair : record.token_pairs) {
        out.per_token.push_back(JensenShannon(pair.pruned, pair.original));
      }
      break;
    case DivergenceForm::kLogits:
      out.per_token.reserve(record.token_pairs.size());
      for (const TokenPair& pair : record.token_pairs) {
        out.per_token.push_back(
            JensenShannon(SoftmaxWithTemperature(pair.pruned, tau),
                          SoftmaxWithTemperature(pair.original, tau)));
      }
      break;
  }
  if (out.per_token.empty()) {
    ThrowInput("divergence record '" + record.id + "' has no tokens");
  }
  double sum = 0.0;
  for (double v : out.per_token) sum += v;
  out.mean = std::clamp(sum / static_cast<double>(out.per_token.size()), 0.0,
                        1.0);
  return out;
}

std::vector<ClusterCds> ComputeClusterCds(
    const Clustering& clustering, std::span<const SampleDivergence> divergences) {
  if (divergences.size() != clustering.labels.size()) {
    ThrowInput("divergence count " + std::to_string(divergences.size()) +
               " does not match clustered sample count " +
               std::to_string(clustering.labels.size()));
  }
  std::vector<ClusterCds> out;
  out.reserve(clustering.k());
  for (std::size_t c = 0; c < clustering.k(); ++c) {
    const auto& members = clustering.members[c];
    if (members.empty()) ThrowInput("cluster " + std::to_string(c + 1) + " is empty");
    double sum = 0.0;
    for (std::size_t i : members) sum += divergences[i].mean;
    out.push_back({static_cast<int>(c),
                   std::clamp(sum / static_cast<double>(members.size()), 0.0,
                              1.0),
                   members.size()});
  }
  return out;
}

std::uint64_t ComputationalCost(std::int64_t x_tokens, std::int64_t y_tokens) {
  if (x_tokens < 0 || y_tokens < 1 || x_tokens + y_tokens < 2) {
    ThrowInput("computational cost needs x_tokens >= 0, y_tokens >= 1 and "
               "x_tokens + y_tokens >= 2");
  }
  const auto len = static_cast<std::uint64_t>(x_tokens + y_tokens);
  return len * len;
}

EfficiencyScore ComputeEfficiency(const SampleDivergence& divergence,
                                  const InstructionSample& sample) {
  EfficiencyScore out;
  out.id = sample.id;
  out.mean_jsd = divergence.mean;
  out.cost = ComputationalCost(sample.x_tokens, sample.y_tokens);
  out.ies = out.mean_jsd / std::log(static_cast<double>(out.cost));
  return out;
}

}  // namespace resel
