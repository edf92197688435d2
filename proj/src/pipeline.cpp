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

#include "resel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <type_traits>
#include <system_error>

#include <json.hpp>

#include "blas_check.hpp"
#include "io_util.hpp"
#include "resel/concepts.hpp"
#include "resel/error.hpp"
#include "resel/manifold.hpp"
#include "resel/random.hpp"

namespace resel {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Runs fn, records its wall time and tags any error with the stage name.
template <typename Fn>
auto Timed(const char* stage, std::vector<StageTiming>* timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  const auto record = [&] {
    if (timings) {
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - start;
      timings->push_back({stage, dt.count()});
    }
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto out = fn();
      record();
      return out;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + stage + "] " + e.what());
  }
}

std::string ClustersJsonl(const Corpus& corpus, const ClusterStageResult& r) {
  std::string out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ojson rec;
    rec["id"] = corpus[i].id;
    rec["cluster"] = r.clustering.labels[i] + 1;
    std::vector<double> coords(static_cast<std::size_t>(r.coords.coords.cols()));
    for (std::size_t j = 0; j < coords.size(); ++j) {
      coords[j] = r.coords.coords(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(j));
    }
    rec["coords"] = coords;
    out += rec.dump() + "\n";
  }
  return out;
}

std::string ScatterCsv(const Corpus& corpus, const ClusterStageResult& r) {
  std::string out = "id,cluster,x1,x2\n";
  const Eigen::MatrixXd& c = r.coords.coords;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out += corpus[i].id + "," + std::to_string(r.clustering.labels[i] + 1) +
           "," + FormatReal(c(row, 0), 17) + "," +
           (c.cols() > 1 ? FormatReal(c(row, 1), 17) : std::string("0")) + "\n";
  }
  return out;
}

std::string CdsCsv(const ScoreStageResult& r) {
  std::string out = "cluster,size,cds\n";
  for (const ClusterCds& c : r.cds) {
    out += std::to_string(c.cluster + 1) + "," + std::to_string(c.size) + "," +
           FormatReal(c.cds, 17) + "\n";
  }
  return out;
}

std::string ScoresJsonl(const Clustering& clustering,
                        const ScoreStageResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.efficiency.size(); ++i) {
    const EfficiencyScore& e = r.efficiency[i];
    ojson rec;
    rec["id"] = e.id;
    rec["cluster"] = clustering.labels[i] + 1;
    rec["mean_jsd"] = e.mean_jsd;
    rec["cost"] = e.cost;
    rec["ies"] = e.ies;
    out += rec.dump() + "\n";
  }
  return out;
}

std::string GraphJson(const ConceptGraph& g) {
  ojson j;
  j["theta"] = g.theta();
  j["vertices"] = g.Vertices();
  ojson edges = ojson::array();
  for (const auto& [a, b] : g.Edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["insertions"] = g.insertion_log();
  return j.dump(2) + "\n";
}

// Writes every (path, text) pair or none of them.
std::vector<std::string> WriteAll(
    const fs::path& out_dir,
    const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) ThrowInput("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::string> written;
  try {
    for (const auto& [name, text] : files) {
      const fs::path path = out_dir / name;
      written.push_back(path.string());
      WriteTextFile(path, text);
    }
  } catch (...) {
    for (const std::string& p : written) fs::remove(p, ec);
    throw;
  }
  return written;
}

}  // namespace

ClusterStageResult RunClusterStage(const PipelineConfig& config,
                                   const EmbeddingSet& embeddings,
                                   std::vector<StageTiming>* timings) {
  ClusterStageResult r;
  const std::size_t n = embeddings.size();
  Timed("manifold", timings, [&] {
    if (n < 3) ThrowInput("at least three samples are required");
    r.d_effective = std::min({config.d, embeddings.dim(), n - 1});
    const DistanceMatrix dist = PairwiseDistances(embeddings.vectors);
    const AdjacencyMatrix adj = BuildAdjacency(dist);
    r.adjacency_sigma = adj.sigma;
    const Laplacian lap = NormalizedLaplacian(adj);
    const KernelSpectrum s = SpectralDecompose(lap.values);
    const std::vector<double> grid =
        config.t_grid.empty() ? DefaultTimeGrid() : config.t_grid;
    r.diffusion_time = SelectDiffusionTime(s, grid);
    for (double t : grid) r.gap_curve.emplace_back(t, SpectralGapCriterion(s, t));
    const std::size_t shown = std::min<std::size_t>(n, r.d_effective + 1);
    for (std::size_t i = 0; i < shown; ++i) {
      r.leading_eigenvalues.push_back(s.eigenvalues(static_cast<Eigen::Index>(i)));
    }
    r.coords = ManifoldEmbed(s, r.d_effective, r.diffusion_time);
  });

  Timed("cluster", timings, [&] {
    r.k_max_effective = std::min(config.k_max, n - 1);
    if (config.k_min > r.k_max_effective) {
      ThrowConfig("k_min " + std::to_string(config.k_min) +
                  " exceeds the usable k_max " +
                  std::to_string(r.k_max_effective) + " for " +
                  std::to_string(n) + " samples");
    }
    const SimilarityMatrix sim = BuildSimilarity(r.coords);
    r.similarity_sigma = sim.sigma;
    ClusterCountOptions opts;
    opts.k_min = config.k_min;
    opts.k_max = r.k_max_effective;
    opts.epsilon = config.epsilon_k;
    opts.restarts = config.nmf_restarts;
    opts.nmf.max_iters = config.nmf_max_iters;
    opts.nmf.rel_tol = config.nmf_tol;
    r.count = SelectNumClusters(sim, config.seed, opts);
    r.clustering = AssignClusters(r.count.factors.w);
  });
  return r;
}

ScoreStageResult RunScoreStage(const PipelineConfig& config,
                               const Corpus& corpus,
                               const std::vector<DivergenceRecord>& records,
                               const Clustering& clustering,
                               std::vector<StageTiming>* timings) {
  return Timed("degradation", timings, [&] {
    if (records.size() != corpus.size()) {
      ThrowInput("divergence log has " + std::to_string(records.size()) +
                 " records for " + std::to_string(corpus.size()) + " samples");
    }
    ScoreStageResult r;
    r.divergences.reserve(corpus.size());
    r.efficiency.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      r.divergences.push_back(ComputeSampleDivergence(records[i], config.tau));
      r.efficiency.push_back(ComputeEfficiency(r.divergences.back(), corpus[i]));
    }
    r.cds = ComputeClusterCds(clustering, r.divergences);
    return r;
  });
}

SelectStageResult RunSelectStage(const PipelineConfig& config,
                                 const Corpus& corpus,
                                 const Clustering& clustering,
                                 const ScoreStageResult& scores,
                                 std::vector<StageTiming>* timings) {
  SelectStageResult r;
  std::vector<double> cds;
  std::size_t budget = 0;
  Timed("allocation", timings, [&] {
    budget = ResolveBudget(config, corpus.size());
    std::vector<std::size_t> sizes;
    for (const ClusterCds& c : scores.cds) {
      cds.push_back(c.cds);
      sizes.push_back(c.size);
    }
    r.allocation = AllocateBudget(cds, sizes, budget);
  });

  Timed("selection", timings, [&] {
    if (clustering.labels.size() != corpus.size() ||
        scores.efficiency.size() != corpus.size()) {
      ThrowInput("clustering, scores and corpus sizes differ");
    }
    const ConceptLimits limits{config.max_concepts, config.min_phrase_words,
                               config.max_phrase_words};
    SelectionProblem problem;
    problem.candidates.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const InstructionSample& s = corpus[i];
      Candidate c;
      c.id = s.id;
      c.cluster = clustering.labels[i];
      c.ies = scores.efficiency[i].ies;
      c.cost = scores.efficiency[i].cost;
      if (s.concepts) {
        c.concepts = *s.concepts;
      } else {
        c.concepts = ExtractConcepts(s.instruction, s.output, DefaultStopwords(),
                                     limits);
        ++r.extracted_concept_sets;
      }
      problem.candidates.push_back(std::move(c));
    }
    problem.cds = cds;
    problem.allocation = r.allocation.per_cluster;
    problem.cost_budget = config.cost_budget;
    problem.theta = config.theta;
    problem.budget = budget;
    problem.seed = config.seed;
    problem.config_fingerprint = ConfigFingerprint(config);
    ConceptGraph graph(config.theta);
    r.manifest = GreedySelect(problem, &graph);
    r.ccg_vertices = graph.vertex_count();
    r.ccg_edges = graph.edge_count();
    r.ccg_json = GraphJson(graph);
  });
  return r;
}

RunReport RunPipeline(const PipelineConfig& config, const PipelineInputs& in,
                      const fs::path& out_dir, PipelineStage stage) {
  RunReport report;
  Timed("config", nullptr, [&] { ValidateConfig(config); });
  report.config_json = ConfigToJson(config);
  report.fingerprint = ConfigFingerprint(config);

  Corpus corpus;
  EmbeddingSet embeddings;
  std::vector<DivergenceRecord> records;
  Timed("load", &report.timings, [&] {
    corpus = LoadCorpus(in.corpus);
    embeddings = LoadEmbeddings(in.embeddings, corpus);
    if (stage != PipelineStage::kCluster) {
      records = LoadDivergenceLog(in.divergences, corpus);
    }
  });
  report.n = corpus.size();
  report.dim = embeddings.dim();
  if (stage != PipelineStage::kCluster) {
    // Budget problems surface before the expensive stages.
    Timed("config", nullptr, [&] {
      if (stage != PipelineStage::kScore) ResolveBudget(config, corpus.size());
    });
  }

  report.cluster = RunClusterStage(config, embeddings, &report.timings);
  report.numeric_backend = BlasBackendDescription();
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("clusters.jsonl", ClustersJsonl(corpus, *report.cluster));
  files.emplace_back("scatter.csv", ScatterCsv(corpus, *report.cluster));

  if (stage != PipelineStage::kCluster) {
    report.score = RunScoreStage(config, corpus, records,
                                 report.cluster->clustering, &report.timings);
    files.emplace_back("cds.csv", CdsCsv(*report.score));
    files.emplace_back("scores.jsonl",
                       ScoresJsonl(report.cluster->clustering, *report.score));
  }
  if (stage == PipelineStage::kSelect || stage == PipelineStage::kRun) {
    report.select = RunSelectStage(config, corpus, report.cluster->clustering,
                                   *report.score, &report.timings);
    files.emplace_back("manifest.json",
                       SerializeManifest(report.select->manifest));
  }
  if (stage == PipelineStage::kRun) {
    files.emplace_back("ccg.json", report.select->ccg_json);
    files.emplace_back("report.txt", FormatReport(report));
  }
  report.written = Timed("write", nullptr, [&] { return WriteAll(out_dir, files); });
  return report;
}

testkit::SyntheticSpec SyntheticSpecFromJson(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::exception& e) {
    ThrowConfig(std::string("malformed synthetic spec: ") + e.what());
  }
  if (!j.is_object()) ThrowConfig("synthetic spec must be a JSON object");
  testkit::SyntheticSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else if (key == "k_true") {
        s.k_true = v.get<std::size_t>();
      } else if (key == "points_per_cluster") {
        s.points_per_cluster = v.get<std::size_t>();
      } else if (key == "dim") {
        s.dim = v.get<std::size_t>();
      } else if (key == "center_spread") {
        s.center_spread = v.get<double>();
      } else if (key == "intra_spread") {
        s.intra_spread = v.get<double>();
      } else if (key == "target_divergence") {
        s.target_divergence = v.get<std::vector<double>>();
      } else if (key == "vocab_size") {
        s.vocab_size = v.get<std::size_t>();
      } else if (key == "min_tokens") {
        s.min_tokens = v.get<std::int64_t>();
      } else if (key == "max_tokens") {
        s.max_tokens = v.get<std::int64_t>();
      } else {
        ThrowConfig("unknown synthetic spec key '" + key + "'");
      }
    }
  } catch (const ojson::type_error& e) {
    ThrowConfig(std::string("synthetic spec: ") + e.what());
  }
  testkit::ValidateSpec(s);
  return s;
}

std::vector<fs::path> WriteSyntheticDataset(const testkit::SyntheticSpec& spec,
                                            SyntheticForm form,
                                            const fs::path& out_dir) {
  testkit::ValidateSpec(spec);
  const testkit::Blobs blobs = testkit::GenBlobs(spec);
  const Corpus corpus = testkit::GenCorpus(spec, blobs.labels);
  const testkit::SyntheticDivergences divs =
      testkit::GenDivergences(spec, corpus, blobs.labels);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) ThrowInput("cannot create " + out_dir.string() + ": " + ec.message());
  const std::vector<fs::path> paths = {
      out_dir / "corpus.jsonl", out_dir / "embeddings.jsonl",
      out_dir / "divergences.jsonl", out_dir / "labels.jsonl"};
  try {
    WriteCorpus(corpus, paths[0]);
    WriteEmbeddings(blobs.embeddings, corpus, paths[1]);
    WriteDivergenceLog(
        form == SyntheticForm::kProbabilities ? divs.pairs : divs.per_token,
        paths[2]);
    std::string labels;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      ojson rec;
      rec["id"] = corpus[i].id;
      rec["label"] = blobs.labels[i] + 1;
      labels += rec.dump() + "\n";
    }
    WriteTextFile(paths[3], labels);
  } catch (...) {
    for (const fs::path& p : paths) fs::remove(p, ec);
    throw;
  }
  return paths;
}

}  // namespace resel
