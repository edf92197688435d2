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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace resel {

enum class Decision {
  kAccepted,
  kInconsistent,   // concept pair conflicts with the consistency graph
  kCostBudget,     // cumulative training cost would exceed the cost budget
  kClusterBudget,  // cluster quota already filled; sample not visited
};

std::string_view DecisionName(Decision decision);
std::optional<Decision> ParseDecision(std::string_view name);

struct SampleRecord {
  std::string id;
  int cluster = 0;  // 1-based
  double ies = 0.0;
  std::uint64_t cost = 0;
  Decision decision = Decision::kAccepted;
  // First conflicting concept pair for kInconsistent, empty otherwise.
  std::vector<std::string> conflict;

  bool operator==(const SampleRecord&) const = default;
};

struct ClusterRecord {
  int cluster = 0;  // 1-based
  std::size_t size = 0;
  double cds = 0.0;
  std::size_t allocated = 0;
  std::size_t realized = 0;

  bool operator==(const ClusterRecord&) const = default;
};

// Output of the selection loop. Clusters and sample records are listed in
// processing order; selected ids in acceptance order.
struct SelectionManifest {
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::optional<std::uint64_t> cost_budget;  // nullopt means unbounded
  std::vector<std::string> selected;
  std::uint64_t cumulative_cost = 0;
  std::vector<ClusterRecord> clusters;
  std::vector<SampleRecord> records;

  bool operator==(const SelectionManifest&) const = default;
};

// Fixed key order and shortest round-trip number formatting: equal manifests
// always produce equal bytes.
std::string SerializeManifest(const SelectionManifest& manifest);
SelectionManifest ParseManifest(std::string_view text);

void WriteManifest(const SelectionManifest& manifest,
                   const std::filesystem::path& path);
SelectionManifest ReadManifest(const std::filesystem::path& path);

}  // namespace resel
