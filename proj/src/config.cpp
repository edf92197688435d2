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

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "io_util.hpp"
#include "resel/error.hpp"
#include "resel/pipeline.hpp"

namespace resel {

namespace {

using ojson = nlohmann::ordered_json;

// Budget ratios are floored after snapping products within this distance of
// an integer, so 0.29 * 100 gives 29 rather than 28.
constexpr double kRatioSnap = 1e-9;

double AsReal(const ojson& v, std::string_view key) {
  if (!v.is_number()) ThrowConfig("config '" + std::string(key) + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) ThrowConfig("config '" + std::string(key) + "' must be finite");
  return x;
}

std::uint64_t AsCount(const ojson& v, std::string_view key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    ThrowConfig("config '" + std::string(key) + "' must be nonnegative");
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x >= 0.0 && x < 1.8e19 && std::floor(x) == x) {
      return static_cast<std::uint64_t>(x);
    }
  }
  ThrowConfig("config '" + std::string(key) + "' must be a nonnegative integer");
}

void Apply(PipelineConfig& c, std::string_view key, const ojson& v) {
  if (key == "tau") {
    c.tau = AsReal(v, key);
  } else if (key == "d") {
    c.d = AsCount(v, key);
  } else if (key == "t_grid") {
    c.t_grid.clear();
    if (v.is_null()) return;
    if (!v.is_array()) ThrowConfig("config 't_grid' must be an array of numbers");
    for (const ojson& t : v) c.t_grid.push_back(AsReal(t, key));
  } else if (key == "k_min") {
    c.k_min = AsCount(v, key);
  } else if (key == "k_max") {
    c.k_max = AsCount(v, key);
  } else if (key == "epsilon_k") {
    c.epsilon_k = AsReal(v, key);
  } else if (key == "budget") {
    c.budget.reset();
    if (v.is_null()) return;
    c.budget = AsCount(v, key);
    c.budget_ratio.reset();
  } else if (key == "budget_ratio") {
    c.budget_ratio.reset();
    if (v.is_null()) return;
    c.budget_ratio = AsReal(v, key);
    c.budget.reset();
  } else if (key == "cost_budget") {
    c.cost_budget.reset();
    if (v.is_null()) return;
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return;
      ThrowConfig("config 'cost_budget' must be an integer, null or \"inf\"");
    }
    c.cost_budget = AsCount(v, key);
  } else if (key == "theta") {
    c.theta = AsReal(v, key);
  } else if (key == "max_concepts") {
    c.max_concepts = AsCount(v, key);
  } else if (key == "min_phrase_words") {
    c.min_phrase_words = AsCount(v, key);
  } else if (key == "max_phrase_words") {
    c.max_phrase_words = AsCount(v, key);
  } else if (key == "seed") {
    c.seed = AsCount(v, key);
  } else if (key == "nmf_restarts") {
    c.nmf_restarts = AsCount(v, key);
  } else if (key == "nmf_max_iters") {
    c.nmf_max_iters = AsCount(v, key);
  } else if (key == "nmf_tol") {
    c.nmf_tol = AsReal(v, key);
  } else {
    ThrowConfig("unknown config key '" + std::string(key) + "'");
  }
}

template <typename T>
ojson Nullable(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson ToObject(const PipelineConfig& c) {
  ojson j = ojson::object();
  j["tau"] = c.tau;
  j["d"] = c.d;
  j["t_grid"] = c.t_grid;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["epsilon_k"] = c.epsilon_k;
  j["budget"] = Nullable(c.budget);
  j["budget_ratio"] = Nullable(c.budget_ratio);
  j["cost_budget"] = Nullable(c.cost_budget);
  j["theta"] = c.theta;
  j["max_concepts"] = c.max_concepts;
  j["min_phrase_words"] = c.min_phrase_words;
  j["max_phrase_words"] = c.max_phrase_words;
  j["seed"] = c.seed;
  j["nmf_restarts"] = c.nmf_restarts;
  j["nmf_max_iters"] = c.nmf_max_iters;
  j["nmf_tol"] = c.nmf_tol;
  return j;
}

}  // namespace

void ValidateConfig(const PipelineConfig& c) {
  if (!(c.tau > 0.0)) ThrowConfig("tau must be positive");
  if (c.d < 1) ThrowConfig("d must be at least 1");
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    if (!(c.t_grid[i] > 0.0)) ThrowConfig("t_grid values must be positive");
    if (i > 0 && !(c.t_grid[i] > c.t_grid[i - 1])) {
      ThrowConfig("t_grid must be strictly ascending");
    }
  }
  if (c.k_min < 1) ThrowConfig("k_min must be at least 1");
  if (c.k_min > c.k_max) ThrowConfig("k_min must not exceed k_max");
  if (!(c.epsilon_k > 0.0 && c.epsilon_k < 1.0)) {
    ThrowConfig("epsilon_k must lie in (0, 1)");
  }
  if (c.budget && c.budget_ratio) {
    ThrowConfig("set only one of budget and budget_ratio");
  }
  if (c.budget && *c.budget < 1) ThrowConfig("budget must be at least 1");
  if (c.budget_ratio && !(*c.budget_ratio > 0.0 && *c.budget_ratio < 1.0)) {
    ThrowConfig("budget_ratio must lie in (0, 1)");
  }
  if (!(c.theta > 0.0 && c.theta <= 1.0)) ThrowConfig("theta must lie in (0, 1]");
  if (c.max_concepts < 1) ThrowConfig("max_concepts must be at least 1");
  if (c.min_phrase_words < 1 || c.min_phrase_words > c.max_phrase_words) {
    ThrowConfig("phrase word limits must satisfy 1 <= min <= max");
  }
  if (c.nmf_restarts < 1) ThrowConfig("nmf_restarts must be at least 1");
  if (c.nmf_max_iters < 1) ThrowConfig("nmf_max_iters must be at least 1");
  if (!(c.nmf_tol >= 0.0)) ThrowConfig("nmf_tol must be nonnegative");
}

std::string ConfigToJson(const PipelineConfig& config) {
  return ToObject(config).dump();
}

PipelineConfig ConfigFromJson(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::exception& e) {
    ThrowConfig(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) ThrowConfig("config must be a flat JSON object");
  const bool has_budget = j.contains("budget") && !j["budget"].is_null();
  const bool has_ratio =
      j.contains("budget_ratio") && !j["budget_ratio"].is_null();
  if (has_budget && has_ratio) {
    ThrowConfig("set only one of budget and budget_ratio");
  }
  PipelineConfig c;
  for (const auto& [key, value] : j.items()) Apply(c, key, value);
  ValidateConfig(c);
  return c;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const Error& e) {
    ThrowConfig(std::string("config file: ") + e.what());
  }
  return ConfigFromJson(text);
}

void SetConfigValue(PipelineConfig& config, std::string_view key,
                    std::string_view json_value) {
  ojson v;
  try {
    v = ojson::parse(json_value);
  } catch (const ojson::exception&) {
    // Bare words such as inf arrive unquoted from the command line.
    v = std::string(json_value);
  }
  Apply(config, key, v);
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  const ojson defaults = ToObject(PipelineConfig{});
  for (const auto& [key, value] : defaults.items()) {
    keys.push_back(key);
  }
  return keys;
}

std::string ConfigFingerprint(const PipelineConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(Fnv1a64(ConfigToJson(config))));
  return buf;
}

std::size_t ResolveBudget(const PipelineConfig& config, std::size_t n) {
  std::size_t b = 0;
  if (config.budget) {
    b = static_cast<std::size_t>(*config.budget);
  } else if (config.budget_ratio) {
    b = static_cast<std::size_t>(
        std::floor(*config.budget_ratio * static_cast<double>(n) + kRatioSnap));
  } else {
    ThrowConfig("no budget: set budget or budget_ratio");
  }
  if (b < 1) ThrowConfig("budget resolves to 0 samples");
  if (b >= n) {
    ThrowConfig("budget " + std::to_string(b) +
                " must be smaller than the corpus size " + std::to_string(n));
  }
  return b;
}

}  // namespace resel
