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

// End-to-end orchestration: configuration, the manifold -> cluster ->
// degradation -> allocation -> selection stages, and their file artifacts.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resel/cluster.hpp"
#include "resel/corpus.hpp"
#include "resel/degradation.hpp"
#include "resel/manifest.hpp"
#include "resel/selector.hpp"
#include "resel/testkit.hpp"

namespace resel {

struct PipelineConfig {
  double tau = 1.0;
  std::size_t d = 16;
  std::vector<double> t_grid;  // empty selects DefaultTimeGrid()
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  double epsilon_k = 0.05;
  // Exactly one of budget and budget_ratio must be set for selection.
  std::optional<std::uint64_t> budget;
  std::optional<double> budget_ratio;
  std::optional<std::uint64_t> cost_budget;  // nullopt is unbounded
  double theta = kDefaultConceptThreshold;
  std::size_t max_concepts = 10;
  std::size_t min_phrase_words = 2;
  std::size_t max_phrase_words = 4;
  std::uint64_t seed = 0;
  std::size_t nmf_restarts = 3;
  std::size_t nmf_max_iters = 200;
  double nmf_tol = 1e-4;
};

// Size-independent checks. Throws Error(kConfig).
void ValidateConfig(const PipelineConfig& config);

// Flat JSON object with every key, in declaration order.
std::string ConfigToJson(const PipelineConfig& config);
// Unknown keys and ill-typed values are config errors. Missing keys keep
// their defaults.
PipelineConfig ConfigFromJson(std::string_view text);
PipelineConfig LoadConfig(const std::filesystem::path& path);
// Sets one key from a JSON value. Setting budget clears budget_ratio and vice
// versa, so a command-line override always wins over the file.
void SetConfigValue(PipelineConfig& config, std::string_view key,
                    std::string_view json_value);
std::vector<std::string> ConfigKeys();

// "fnv1a64:" + 16 hex digits over the canonical config JSON.
std::string ConfigFingerprint(const PipelineConfig& config);

// Count budget for an N-sample corpus. Throws Error(kConfig) unless
// 1 <= B < N.
std::size_t ResolveBudget(const PipelineConfig& config, std::size_t n);

struct ClusterStageResult {
  std::size_t d_effective = 0;
  std::size_t k_max_effective = 0;
  double adjacency_sigma = 0.0;
  double similarity_sigma = 0.0;
  double diffusion_time = 0.0;
  std::vector<std::pair<double, double>> gap_curve;  // (t, criterion)
  std::vector<double> leading_eigenvalues;           // smallest Laplacian mu
  ManifoldCoords coords;
  ClusterCountResult count;
  Clustering clustering;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

// Each stage function appends its own timings when `timings` is given and
// prefixes error messages with the failing stage.
ClusterStageResult RunClusterStage(const PipelineConfig& config,
                                   const EmbeddingSet& embeddings,
                                   std::vector<StageTiming>* timings = nullptr);

struct ScoreStageResult {
  std::vector<SampleDivergence> divergences;  // corpus order
  std::vector<EfficiencyScore> efficiency;    // corpus order
  std::vector<ClusterCds> cds;
};

ScoreStageResult RunScoreStage(const PipelineConfig& config,
                               const Corpus& corpus,
                               const std::vector<DivergenceRecord>& records,
                               const Clustering& clustering,
                               std::vector<StageTiming>* timings = nullptr);

struct SelectStageResult {
  BudgetAllocation allocation;
  SelectionManifest manifest;
  std::size_t ccg_vertices = 0;
  std::size_t ccg_edges = 0;
  std::size_t extracted_concept_sets = 0;
  std::string ccg_json;
};

SelectStageResult RunSelectStage(const PipelineConfig& config,
                                 const Corpus& corpus,
                                 const Clustering& clustering,
                                 const ScoreStageResult& scores,
                                 std::vector<StageTiming>* timings = nullptr);

enum class PipelineStage { kCluster = 1, kScore = 2, kSelect = 3, kRun = 4 };

struct PipelineInputs {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path divergences;  // unused for kCluster
};

struct RunReport {
  std::string config_json;
  std::string fingerprint;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::string numeric_backend;
  std::vector<StageTiming> timings;
  std::optional<ClusterStageResult> cluster;
  std::optional<ScoreStageResult> score;
  std::optional<SelectStageResult> select;
  std::vector<std::string> written;  // artifact paths
};

// Runs the stages up to `stage` and writes its artifacts into out_dir:
//   cluster  clusters.jsonl, scatter.csv
//   score    + cds.csv, scores.jsonl
//   select   + manifest.json
//   run      + ccg.json, report.txt
// Errors carry the stage name; nothing is left in out_dir on failure.
RunReport RunPipeline(const PipelineConfig& config, const PipelineInputs& in,
                      const std::filesystem::path& out_dir,
                      PipelineStage stage = PipelineStage::kRun);

std::string FormatReport(const RunReport& report);

// Human-readable summary of a manifest, JSONL, CSV or graph artifact.
std::string InspectArtifact(const std::filesystem::path& path);

enum class SyntheticForm { kProbabilities, kPerTokenJsd };

// Writes corpus.jsonl, embeddings.jsonl, divergences.jsonl and labels.jsonl.
std::vector<std::filesystem::path> WriteSyntheticDataset(
    const testkit::SyntheticSpec& spec, SyntheticForm form,
    const std::filesystem::path& out_dir);

testkit::SyntheticSpec SyntheticSpecFromJson(std::string_view text);

}  // namespace resel
