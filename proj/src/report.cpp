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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "io_util.hpp"
#include "resel/error.hpp"
#include "resel/pipeline.hpp"

namespace resel {

namespace {

using ojson = nlohmann::ordered_json;
using Table = std::vector<std::vector<std::string>>;

std::string Render(const Table& rows, const std::string& indent = "  ") {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line = indent;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string Bar(double fraction, std::size_t width = 40) {
  const auto n = static_cast<std::size_t>(
      std::llround(std::clamp(fraction, 0.0, 1.0) * static_cast<double>(width)));
  return std::string(n, '#');
}

std::string CostBudgetText(const std::optional<std::uint64_t>& u) {
  return u ? std::to_string(*u) : std::string("inf");
}

// Decision counts per 1-based cluster.
std::map<int, std::array<std::size_t, 4>> CountDecisions(
    const SelectionManifest& m) {
  std::map<int, std::array<std::size_t, 4>> out;
  for (const ClusterRecord& c : m.clusters) out[c.cluster] = {0, 0, 0, 0};
  for (const SampleRecord& r : m.records) {
    ++out[r.cluster][static_cast<std::size_t>(r.decision)];
  }
  return out;
}

std::string ManifestTables(const SelectionManifest& m) {
  const auto counts = CountDecisions(m);
  Table t = {{"cluster", "size", "cds", "allocated", "realized", "accepted",
              "inconsistent", "cost_budget", "cluster_budget"}};
  std::array<std::size_t, 4> total{0, 0, 0, 0};
  std::size_t allocated = 0;
  std::size_t realized = 0;
  std::size_t size = 0;
  for (const ClusterRecord& c : m.clusters) {
    const auto& k = counts.at(c.cluster);
    t.push_back({std::to_string(c.cluster), std::to_string(c.size),
                 FormatReal(c.cds), std::to_string(c.allocated),
                 std::to_string(c.realized), std::to_string(k[0]),
                 std::to_string(k[1]), std::to_string(k[2]),
                 std::to_string(k[3])});
    for (std::size_t i = 0; i < 4; ++i) total[i] += k[i];
    allocated += c.allocated;
    realized += c.realized;
    size += c.size;
  }
  t.push_back({"total", std::to_string(size), "", std::to_string(allocated),
               std::to_string(realized), std::to_string(total[0]),
               std::to_string(total[1]), std::to_string(total[2]),
               std::to_string(total[3])});
  std::string out = Render(t);
  out += "\n";
  Table reasons = {{"decision", "count"}};
  for (Decision d : {Decision::kAccepted, Decision::kInconsistent,
                     Decision::kCostBudget, Decision::kClusterBudget}) {
    reasons.push_back({std::string(DecisionName(d)),
                       std::to_string(total[static_cast<std::size_t>(d)])});
  }
  out += Render(reasons);
  return out;
}

std::string InspectManifest(const SelectionManifest& m) {
  std::ostringstream out;
  out << "manifest\n";
  out << Render({{"config fingerprint", m.config_fingerprint},
                 {"seed", std::to_string(m.seed)},
                 {"budget", std::to_string(m.budget)},
                 {"cost budget", CostBudgetText(m.cost_budget)},
                 {"selected", std::to_string(m.selected.size())},
                 {"cumulative cost", std::to_string(m.cumulative_cost)}});
  out << "\n" << ManifestTables(m);
  return out.str();
}

std::string InspectJsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t count = 0;
  std::vector<std::string> keys;
  std::string shown;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson rec;
    try {
      rec = ojson::parse(line);
    } catch (const ojson::exception& e) {
      ThrowInput("line " + std::to_string(count + 1) + ": " + e.what());
    }
    if (count == 0 && rec.is_object()) {
      for (const auto& [k, v] : rec.items()) keys.push_back(k);
    }
    if (count < 10) {
      std::string s = rec.dump();
      if (s.size() > 160) s = s.substr(0, 157) + "...";
      shown += "  " + s + "\n";
    }
    ++count;
  }
  std::string out = "records  " + std::to_string(count) + "\nfields   ";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out += (i ? ", " : "") + keys[i];
  }
  out += "\n\n" + shown;
  if (count > 10) out += "  ... " + std::to_string(count - 10) + " more\n";
  return out;
}

std::string InspectCsv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::string cell;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) row.push_back(cell);
    t.push_back(std::move(row));
  }
  return Render(t, "");
}

}  // namespace

std::string FormatReport(const RunReport& r) {
  std::ostringstream out;
  out << "resel run report\n\n";
  out << Render({{"config fingerprint", r.fingerprint},
                 {"samples", std::to_string(r.n)},
                 {"embedding dim", std::to_string(r.dim)},
                 {"numeric backend", r.numeric_backend}});

  out << "\n[config]\n"
      << ojson::parse(r.config_json).dump(2) << "\n";

  out << "\n[stage timings]\n";
  Table timings = {{"stage", "seconds"}};
  double total = 0.0;
  for (const StageTiming& t : r.timings) {
    timings.push_back({t.stage, FormatReal(t.seconds, 4)});
    total += t.seconds;
  }
  timings.push_back({"total", FormatReal(total, 4)});
  out << Render(timings);

  if (r.cluster) {
    const ClusterStageResult& c = *r.cluster;
    out << "\n[manifold]\n";
    out << Render({{"adjacency sigma", FormatReal(c.adjacency_sigma)},
                   {"manifold dim d", std::to_string(c.d_effective)},
                   {"diffusion time t", FormatReal(c.diffusion_time)}});
    std::string eig;
    for (double mu : c.leading_eigenvalues) eig += " " + FormatReal(mu);
    out << "  smallest Laplacian eigenvalues:" << eig << "\n";
    out << "  spectral gap criterion by t\n";
    Table gap = {{"t", "criterion"}};
    for (const auto& [t, g] : c.gap_curve) gap.push_back({FormatReal(t), FormatReal(g)});
    out << Render(gap, "    ");

    out << "\n[clusters]\n";
    out << Render({{"similarity sigma", FormatReal(c.similarity_sigma)},
                   {"k range", std::to_string(c.count.errors.empty()
                                                   ? 0
                                                   : c.count.errors.front().first) +
                                   ".." + std::to_string(c.k_max_effective)},
                   {"chosen K", std::to_string(c.count.k)},
                   {"non-empty clusters", std::to_string(c.clustering.k())}});
    out << "  err(k)\n";
    Table curve = {{"k", "error", "relative drop"}};
    for (std::size_t i = 0; i < c.count.errors.size(); ++i) {
      const auto& [k, e] = c.count.errors[i];
      std::string drop;
      if (i + 1 < c.count.errors.size() && e > 0.0) {
        drop = FormatReal((e - c.count.errors[i + 1].second) / e);
      }
      curve.push_back({std::to_string(k), FormatReal(e), drop});
    }
    out << Render(curve, "    ");
  }

  if (r.score) {
    out << "\n[degradation]\n";
    double top = 0.0;
    for (const ClusterCds& c : r.score->cds) top = std::max(top, c.cds);
    Table cds = {{"cluster", "size", "cds", ""}};
    for (const ClusterCds& c : r.score->cds) {
      cds.push_back({std::to_string(c.cluster + 1), std::to_string(c.size),
                     FormatReal(c.cds), Bar(top > 0.0 ? c.cds / top : 0.0)});
    }
    out << Render(cds);
  }

  if (r.select) {
    const SelectStageResult& s = *r.select;
    const SelectionManifest& m = s.manifest;
    out << "\n[allocation]\n";
    out << Render({{"budget B", std::to_string(m.budget)},
                   {"allocated", std::to_string(s.allocation.total)},
                   {"size weighted", s.allocation.size_weighted ? "yes" : "no"}});
    for (const std::string& line : s.allocation.log) out << "  " << line << "\n";

    out << "\n[selection]\n";
    out << Render({{"selected", std::to_string(m.selected.size())},
                   {"cumulative cost", std::to_string(m.cumulative_cost)},
                   {"cost budget", CostBudgetText(m.cost_budget)},
                   {"extracted concept sets",
                    std::to_string(s.extracted_concept_sets)}});
    out << "\n" << ManifestTables(m);

    out << "\n[concept graph]\n";
    out << Render({{"vertices", std::to_string(s.ccg_vertices)},
                   {"edges", std::to_string(s.ccg_edges)}});
  }
  return out.str();
}

std::string InspectArtifact(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  const std::string ext = path.extension().string();
  if (ext == ".jsonl") return InspectJsonl(text);
  if (ext == ".csv") return InspectCsv(text);
  if (ext == ".json") {
    ojson j;
    try {
      j = ojson::parse(text);
    } catch (const ojson::exception& e) {
      ThrowInput(path.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains("format")) {
      return InspectManifest(ParseManifest(text));
    }
    if (j.is_object() && j.contains("vertices") && j.contains("edges")) {
      std::string out = Render(
          {{"vertices", std::to_string(j["vertices"].size())},
           {"edges", std::to_string(j["edges"].size())},
           {"insertions",
            std::to_string(j.contains("insertions") ? j["insertions"].size() : 0)}},
          "");
      for (const auto& v : j["vertices"]) out += "  " + v.get<std::string>() + "\n";
      return out;
    }
    return j.dump(2) + "\n";
  }
  return text;
}

}  // namespace resel
