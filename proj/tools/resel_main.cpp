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

// resel command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "resel/resel.h"

namespace {

constexpr int kConfigExit = RESEL_ERR_CONFIG;

// Config keys exposed as --<key> flags, with help text.
const std::vector<std::pair<std::string, std::string>> kConfigFlags = {
    {"tau", "softmax temperature for logit divergence logs"},
    {"d", "manifold dimension (clamped to min(d, dim_e, N-1))"},
    {"t_grid", "comma-separated diffusion times"},
    {"k_min", "smallest cluster count"},
    {"k_max", "largest cluster count"},
    {"epsilon_k", "elbow threshold on the relative error drop"},
    {"budget", "number of samples to select"},
    {"budget_ratio", "fraction of the corpus to select"},
    {"cost_budget", "cumulative cost budget, or inf"},
    {"theta", "concept similarity threshold"},
    {"max_concepts", "concepts kept per sample"},
    {"min_phrase_words", "shortest concept phrase"},
    {"max_phrase_words", "longest concept phrase"},
    {"seed", "random seed"},
    {"nmf_restarts", "NMF restarts per cluster count"},
    {"nmf_max_iters", "NMF iteration cap"},
    {"nmf_tol", "NMF relative error tolerance"},
};

struct ConfigDeleter {
  void operator()(resel_config* c) const { resel_config_free(c); }
};
using ConfigPtr = std::unique_ptr<resel_config, ConfigDeleter>;

int Report(resel_status status) {
  if (status != RESEL_OK) {
    std::fprintf(stderr, "resel: error: %s\n", resel_last_error());
  }
  return static_cast<int>(status);
}

// "0.1,0.2" -> "[0.1,0.2]"; anything already bracketed passes through.
std::string ListToJson(const std::string& text) {
  if (!text.empty() && text.front() == '[') return text;
  return "[" + text + "]";
}

struct PipelineArgs {
  std::string config_path;
  std::string corpus;
  std::string embeddings;
  std::string divergences;
  std::string out_dir;
  std::map<std::string, std::string> overrides;
  bool print_report = false;
};

void AddPipelineOptions(CLI::App* cmd, PipelineArgs& args, bool needs_divergences) {
  cmd->add_option("--config", args.config_path, "flat JSON config file");
  cmd->add_option("--corpus", args.corpus, "corpus JSONL")->required();
  cmd->add_option("--embeddings", args.embeddings, "embeddings JSONL")->required();
  auto* div = cmd->add_option("--divergences", args.divergences,
                              "divergence log JSONL");
  if (needs_divergences) div->required();
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_flag("--print-report", args.print_report,
                "print the run report to stdout");
  for (const auto& [key, help] : kConfigFlags) {
    cmd->add_option("--" + key, args.overrides[key], help);
  }
}

int RunStage(CLI::App* cmd, PipelineArgs& args, resel_stage stage) {
  resel_config* raw = nullptr;
  resel_status st = args.config_path.empty()
                        ? resel_config_new(&raw)
                        : resel_config_load(args.config_path.c_str(), &raw);
  if (st != RESEL_OK) return Report(st);
  ConfigPtr config(raw);

  const bool has_budget = cmd->count("--budget") > 0;
  const bool has_ratio = cmd->count("--budget_ratio") > 0;
  if (has_budget && has_ratio) {
    std::fprintf(stderr, "resel: error: --budget and --budget_ratio are exclusive\n");
    return kConfigExit;
  }
  for (const auto& [key, help] : kConfigFlags) {
    if (cmd->count("--" + key) == 0) continue;
    std::string value = args.overrides[key];
    if (key == "t_grid") value = ListToJson(value);
    st = resel_config_set(config.get(), key.c_str(), value.c_str());
    if (st != RESEL_OK) return Report(st);
  }

  char* report = nullptr;
  st = resel_run(config.get(), args.corpus.c_str(), args.embeddings.c_str(),
                 args.divergences.empty() ? nullptr : args.divergences.c_str(),
                 args.out_dir.c_str(), stage, &report);
  if (st != RESEL_OK) return Report(st);
  if (args.print_report || stage == RESEL_STAGE_RUN) {
    std::fputs(report, stdout);
  } else {
    std::printf("wrote %s artifacts to %s\n", cmd->get_name().c_str(),
                args.out_dir.c_str());
  }
  resel_string_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resel: recovery-data selection for pruned language models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(resel_version()));

  PipelineArgs cluster_args;
  PipelineArgs score_args;
  PipelineArgs select_args;
  PipelineArgs run_args;
  auto* cluster = app.add_subcommand(
      "cluster", "manifold embedding and clustering (clusters.jsonl, scatter.csv)");
  AddPipelineOptions(cluster, cluster_args, false);
  auto* score = app.add_subcommand(
      "score", "cluster, then degradation scores (cds.csv, scores.jsonl)");
  AddPipelineOptions(score, score_args, true);
  auto* select = app.add_subcommand("select", "full selection (manifest.json)");
  AddPipelineOptions(select, select_args, true);
  auto* run = app.add_subcommand(
      "run", "full pipeline with every artifact and report.txt");
  AddPipelineOptions(run, run_args, true);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "pretty-print an artifact");
  inspect->add_option("path", inspect_path, "artifact file")->required();

  std::string synth_out;
  std::string synth_form = "probabilities";
  std::string synth_targets;
  std::map<std::string, std::string> synth_fields;
  auto* synth = app.add_subcommand("synth", "write a synthetic blob dataset");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--form", synth_form, "divergence log form")
      ->check(CLI::IsMember({"probabilities", "per_token_jsd"}));
  synth->add_option("--target_divergence", synth_targets,
                    "comma-separated target mean JSD per blob");
  for (const char* key : {"seed", "k_true", "points_per_cluster", "dim",
                          "center_spread", "intra_spread", "vocab_size",
                          "min_tokens", "max_tokens"}) {
    synth->add_option(std::string("--") + key, synth_fields[key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  if (*cluster) return RunStage(cluster, cluster_args, RESEL_STAGE_CLUSTER);
  if (*score) return RunStage(score, score_args, RESEL_STAGE_SCORE);
  if (*select) return RunStage(select, select_args, RESEL_STAGE_SELECT);
  if (*run) return RunStage(run, run_args, RESEL_STAGE_RUN);

  if (*inspect) {
    char* text = nullptr;
    const resel_status st = resel_inspect(inspect_path.c_str(), &text);
    if (st != RESEL_OK) return Report(st);
    std::fputs(text, stdout);
    resel_string_free(text);
    return 0;
  }

  if (*synth) {
    nlohmann::json spec = nlohmann::json::object();
    for (const auto& [key, value] : synth_fields) {
      if (synth->count("--" + key) == 0) continue;
      try {
        spec[key] = nlohmann::json::parse(value);
      } catch (const nlohmann::json::exception&) {
        std::fprintf(stderr, "resel: error: --%s expects a number\n", key.c_str());
        return kConfigExit;
      }
    }
    if (!synth_targets.empty()) {
      try {
        spec["target_divergence"] = nlohmann::json::parse(ListToJson(synth_targets));
      } catch (const nlohmann::json::exception&) {
        std::fprintf(stderr, "resel: error: --target_divergence expects numbers\n");
        return kConfigExit;
      }
    }
    const resel_status st = resel_synth(
        spec.dump().c_str(),
        synth_form == "per_token_jsd" ? RESEL_SYNTH_PER_TOKEN_JSD
                                      : RESEL_SYNTH_PROBABILITIES,
        synth_out.c_str());
    if (st != RESEL_OK) return Report(st);
    std::printf("wrote synthetic dataset to %s\n", synth_out.c_str());
    return 0;
  }
  return 0;
}
