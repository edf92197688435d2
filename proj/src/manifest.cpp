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

#include "resel/manifest.hpp"

#include <array>
#include <utility>

#include "io_util.hpp"
#include "json.hpp"
#include "resel/error.hpp"

namespace resel {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Decision, std::string_view>, 4> kDecisionNames{{
    {Decision::kAccepted, "accepted"},
    {Decision::kInconsistent, "inconsistent"},
    {Decision::kCostBudget, "cost_budget"},
    {Decision::kClusterBudget, "cluster_budget"},
}};

template <typename T>
T Get(const ojson& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) ThrowInput(std::string("manifest: missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const ojson::exception& e) {
    ThrowInput(std::string("manifest: bad '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view DecisionName(Decision decision) {
  for (const auto& [d, name] : kDecisionNames) {
    if (d == decision) return name;
  }
  return "unknown";
}

std::optional<Decision> ParseDecision(std::string_view name) {
  for (const auto& [d, n] : kDecisionNames) {
    if (n == name) return d;
  }
  return std::nullopt;
}

std::string SerializeManifest(const SelectionManifest& m) {
  ojson doc;
  doc["format"] = "resel-manifest/1";
  doc["config_fingerprint"] = m.config_fingerprint;
  doc["seed"] = m.seed;
  doc["budget"] = m.budget;
  doc["cost_budget"] =
      m.cost_budget ? ojson(*m.cost_budget) : ojson(nullptr);
  doc["selected_count"] = m.selected.size();
  doc["cumulative_cost"] = m.cumulative_cost;
  doc["selected"] = m.selected;

  ojson clusters = ojson::array();
  for (const ClusterRecord& c : m.clusters) {
    ojson row;
    row["cluster"] = c.cluster;
    row["size"] = c.size;
    row["cds"] = c.cds;
    row["allocated"] = c.allocated;
    row["realized"] = c.realized;
    clusters.push_back(std::move(row));
  }
  doc["clusters"] = std::move(clusters);

  ojson records = ojson::array();
  for (const SampleRecord& r : m.records) {
    ojson row;
    row["id"] = r.id;
    row["cluster"] = r.cluster;
    row["ies"] = r.ies;
    row["cost"] = r.cost;
    row["decision"] = DecisionName(r.decision);
    if (!r.conflict.empty()) row["conflict"] = r.conflict;
    records.push_back(std::move(row));
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

SelectionManifest ParseManifest(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::exception& e) {
    ThrowInput(std::string("manifest: malformed document: ") + e.what());
  }
  if (!doc.is_object()) ThrowInput("manifest: document must be an object");

  SelectionManifest m;
  m.config_fingerprint = Get<std::string>(doc, "config_fingerprint");
  m.seed = Get<std::uint64_t>(doc, "seed");
  m.budget = Get<std::uint64_t>(doc, "budget");
  if (auto it = doc.find("cost_budget"); it != doc.end() && !it->is_null()) {
    m.cost_budget = it->get<std::uint64_t>();
  }
  m.cumulative_cost = Get<std::uint64_t>(doc, "cumulative_cost");
  m.selected = Get<std::vector<std::string>>(doc, "selected");

  for (const ojson& row : Get<ojson>(doc, "clusters")) {
    ClusterRecord c;
    c.cluster = Get<int>(row, "cluster");
    c.size = Get<std::size_t>(row, "size");
    c.cds = Get<double>(row, "cds");
    c.allocated = Get<std::size_t>(row, "allocated");
    c.realized = Get<std::size_t>(row, "realized");
    m.clusters.push_back(c);
  }
  for (const ojson& row : Get<ojson>(doc, "records")) {
    SampleRecord r;
    r.id = Get<std::string>(row, "id");
    r.cluster = Get<int>(row, "cluster");
    r.ies = Get<double>(row, "ies");
    r.cost = Get<std::uint64_t>(row, "cost");
    const auto decision = ParseDecision(Get<std::string>(row, "decision"));
    if (!decision) ThrowInput("manifest: unknown decision for '" + r.id + "'");
    r.decision = *decision;
    if (row.contains("conflict")) {
      r.conflict = Get<std::vector<std::string>>(row, "conflict");
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

void WriteManifest(const SelectionManifest& manifest,
                   const std::filesystem::path& path) {
  WriteTextFile(path, SerializeManifest(manifest));
}

SelectionManifest ReadManifest(const std::filesystem::path& path) {
  return ParseManifest(ReadTextFile(path));
}

}  // namespace resel
