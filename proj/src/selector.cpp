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

#include "resel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resel/error.hpp"

namespace resel {

namespace {

// Shares and remainders are compared on a 1e-9 grid so that rescaling every
// weight by the same factor cannot flip a floor or a remainder tie through
// rounding noise.
constexpr double kShareResolution = 1e9;

}  // namespace

BudgetAllocation AllocateBudget(std::span<const double> cds,
                                std::span<const std::size_t> sizes,
                                std::size_t budget) {
  const std::size_t k = cds.size();
  if (k == 0) ThrowConfig("budget allocation needs at least one cluster");
  if (sizes.size() != k) ThrowInput("cluster sizes and CDS lengths differ");
  if (budget < 1) ThrowConfig("budget must be at least 1");
  const std::size_t capacity =
      std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (budget >= capacity) {
    ThrowConfig("budget " + std::to_string(budget) +
                " must be smaller than the corpus size " +
                std::to_string(capacity));
  }

  BudgetAllocation out;
  std::vector<double> weight(cds.begin(), cds.end());
  for (double w : weight) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      ThrowInput("CDS values must be finite and nonnegative");
    }
  }
  double total_weight = std::accumulate(weight.begin(), weight.end(), 0.0);
  if (total_weight <= 0.0) {
    out.size_weighted = true;
    out.log.push_back("all CDS are zero; weighting by cluster size");
    for (std::size_t c = 0; c < k; ++c) weight[c] = static_cast<double>(sizes[c]);
    total_weight = static_cast<double>(capacity);
  }

  out.per_cluster.assign(k, 0);
  std::vector<long long> remainder(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    const double share = static_cast<double>(budget) * (weight[c] / total_weight);
    const long long scaled = std::llround(share * kShareResolution);
    const long long unit = static_cast<long long>(kShareResolution);
    out.per_cluster[c] = static_cast<std::size_t>(scaled / unit);
    remainder[c] = scaled % unit;
    if (out.per_cluster[c] > sizes[c]) {
      out.log.push_back("cluster " + std::to_string(c + 1) + " capped at " +
                        std::to_string(sizes[c]) + " (share " +
                        std::to_string(out.per_cluster[c]) + ")");
      out.per_cluster[c] = sizes[c];
    }
  }

  std::size_t assigned = std::accumulate(out.per_cluster.begin(),
                                         out.per_cluster.end(), std::size_t{0});
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  if (assigned < budget) {
    out.log.push_back(std::to_string(budget - assigned) +
                      " leftover unit(s) by largest remainder");
  }
  while (assigned < budget) {
    bool progressed = false;
    for (std::size_t c : order) {
      if (assigned == budget) break;
      if (out.per_cluster[c] < sizes[c]) {
        ++out.per_cluster[c];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  out.total = assigned;
  return out;
}

std::vector<std::size_t> OrderClusters(std::span<const double> cds) {
  std::vector<std::size_t> order(cds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cds[a] > cds[b];
  });
  return order;
}

SelectionManifest GreedySelect(const SelectionProblem& problem,
                               ConceptGraph* graph) {
  const std::size_t k = problem.cds.size();
  if (problem.allocation.size() != k) {
    ThrowInput("allocation and CDS lengths differ");
  }
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < problem.candidates.size(); ++i) {
    const int c = problem.candidates[i].cluster;
    if (c < 0 || static_cast<std::size_t>(c) >= k) {
      ThrowInput("candidate '" + problem.candidates[i].id +
                 "' has an out-of-range cluster");
    }
    members[static_cast<std::size_t>(c)].push_back(i);
  }

  ConceptGraph local(problem.theta);
  ConceptGraph& g = graph ? *graph : local;

  SelectionManifest m;
  m.config_fingerprint = problem.config_fingerprint;
  m.seed = problem.seed;
  m.budget = problem.budget;
  m.cost_budget = problem.cost_budget;

  for (std::size_t c : OrderClusters(problem.cds)) {
    std::vector<std::size_t> ranked = members[c];
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) {
                       return problem.candidates[a].ies >
                              problem.candidates[b].ies;
                     });
    const std::size_t quota = problem.allocation[c];
    std::size_t count = 0;
    for (std::size_t i : ranked) {
      const Candidate& cand = problem.candidates[i];
      SampleRecord rec{cand.id, static_cast<int>(c) + 1, cand.ies, cand.cost,
                       Decision::kClusterBudget, {}};
      if (count < quota) {
        const ConsistencyVerdict verdict = g.IsConsistent(cand.concepts);
        if (!verdict.consistent) {
          rec.decision = Decision::kInconsistent;
          rec.conflict = {verdict.witness->first, verdict.witness->second};
        } else if (problem.cost_budget &&
                   m.cumulative_cost + cand.cost > *problem.cost_budget) {
          rec.decision = Decision::kCostBudget;
        } else {
          rec.decision = Decision::kAccepted;
          g.Insert(cand.concepts);
          m.cumulative_cost += cand.cost;
          m.selected.push_back(cand.id);
          ++count;
        }
      }
      m.records.push_back(std::move(rec));
    }
    m.clusters.push_back({static_cast<int>(c) + 1, members[c].size(),
                          problem.cds[c], quota, count});
  }
  return m;
}

}  // namespace resel
