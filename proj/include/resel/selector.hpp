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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resel/concepts.hpp"
#include "resel/manifest.hpp"

namespace resel {

struct BudgetAllocation {
  std::vector<std::size_t> per_cluster;
  std::size_t total = 0;
  // True when every CDS was zero and cluster sizes were used as weights.
  bool size_weighted = false;
  std::vector<std::string> log;
};

// Splits `budget` across clusters proportionally to their CDS: floors of the
// proportional shares, then one unit at a time by largest fractional
// remainder (ties to the lower cluster), with every cluster capped at its
// size and the overflow redistributed. Requires 1 <= budget < sum(sizes).
BudgetAllocation AllocateBudget(std::span<const double> cds,
                                std::span<const std::size_t> sizes,
                                std::size_t budget);

// Descending CDS, ties by ascending cluster index (0-based result).
std::vector<std::size_t> OrderClusters(std::span<const double> cds);

struct Candidate {
  std::string id;
  int cluster = 0;  // 0-based
  double ies = 0.0;
  std::uint64_t cost = 0;
  std::vector<std::string> concepts;
};

// Everything the acceptance walk needs; candidates are in corpus order.
struct SelectionProblem {
  std::vector<Candidate> candidates;
  std::vector<double> cds;               // per cluster
  std::vector<std::size_t> allocation;   // per cluster
  std::optional<std::uint64_t> cost_budget;
  double theta = kDefaultConceptThreshold;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::string config_fingerprint;
};

// Walks clusters in OrderClusters order and each cluster's members by
// descending IES (ties to the lower corpus index). A member is accepted when
// its concepts are consistent with the shared graph and the cumulative cost
// stays within the cost budget; a cluster stops once its allocation is met.
// Members left unvisited are recorded as kClusterBudget.
SelectionManifest GreedySelect(const SelectionProblem& problem,
                               ConceptGraph* graph = nullptr);

}  // namespace resel
