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

#include "resel/resel.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <span>
#include <string>

#include "resel/degradation.hpp"
#include "resel/error.hpp"
#include "resel/pipeline.hpp"

struct resel_config {
  resel::PipelineConfig config;
};

namespace {

thread_local std::string g_last_error;

resel_status Fail(resel_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
resel_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return RESEL_OK;
  } catch (const resel::Error& e) {
    return Fail(static_cast<resel_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(RESEL_ERR_NUMERICAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(RESEL_ERR_INPUT, e.what());
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void RequireArg(const void* p, const char* name) {
  if (p == nullptr) resel::ThrowInput(std::string(name) + " must not be NULL");
}

void RequireDistribution(std::span<const double> p, const char* name) {
  if (p.empty()) resel::ThrowInput(std::string(name) + " is empty");
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      resel::ThrowInput(std::string(name) + " has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    resel::ThrowInput(std::string(name) + " does not sum to 1");
  }
}

}  // namespace

extern "C" {

const char* resel_version(void) { return "0.1.0"; }

const char* resel_last_error(void) { return g_last_error.c_str(); }

void resel_string_free(char* s) { std::free(s); }

resel_status resel_config_new(resel_config** out) {
  return Guard([&] {
    RequireArg(out, "out");
    *out = new resel_config();
  });
}

resel_status resel_config_load(const char* path, resel_config** out) {
  return Guard([&] {
    RequireArg(path, "path");
    RequireArg(out, "out");
    *out = nullptr;
    auto* c = new resel_config();
    try {
      c->config = resel::LoadConfig(path);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

void resel_config_free(resel_config* config) { delete config; }

resel_status resel_config_set(resel_config* config, const char* key,
                              const char* json_value) {
  return Guard([&] {
    RequireArg(config, "config");
    RequireArg(key, "key");
    RequireArg(json_value, "json_value");
    resel::PipelineConfig updated = config->config;
    resel::SetConfigValue(updated, key, json_value);
    config->config = std::move(updated);
  });
}

resel_status resel_config_to_json(const resel_config* config, char** out) {
  return Guard([&] {
    RequireArg(config, "config");
    RequireArg(out, "out");
    *out = CopyString(resel::ConfigToJson(config->config));
  });
}

resel_status resel_config_fingerprint(const resel_config* config, char** out) {
  return Guard([&] {
    RequireArg(config, "config");
    RequireArg(out, "out");
    *out = CopyString(resel::ConfigFingerprint(config->config));
  });
}

resel_status resel_run(const resel_config* config, const char* corpus_path,
                       const char* embeddings_path,
                       const char* divergences_path, const char* out_dir,
                       resel_stage stage, char** report_out) {
  return Guard([&] {
    RequireArg(config, "config");
    RequireArg(corpus_path, "corpus_path");
    RequireArg(embeddings_path, "embeddings_path");
    RequireArg(out_dir, "out_dir");
    if (stage < RESEL_STAGE_CLUSTER || stage > RESEL_STAGE_RUN) {
      resel::ThrowConfig("unknown pipeline stage");
    }
    if (stage != RESEL_STAGE_CLUSTER) RequireArg(divergences_path, "divergences_path");
    resel::PipelineInputs in{corpus_path, embeddings_path,
                             divergences_path ? divergences_path : ""};
    const resel::RunReport report = resel::RunPipeline(
        config->config, in, out_dir, static_cast<resel::PipelineStage>(stage));
    if (report_out != nullptr) *report_out = CopyString(resel::FormatReport(report));
  });
}

resel_status resel_inspect(const char* path, char** out) {
  return Guard([&] {
    RequireArg(path, "path");
    RequireArg(out, "out");
    *out = CopyString(resel::InspectArtifact(path));
  });
}

resel_status resel_synth(const char* spec_json, resel_synth_form form,
                         const char* out_dir) {
  return Guard([&] {
    RequireArg(spec_json, "spec_json");
    RequireArg(out_dir, "out_dir");
    const resel::testkit::SyntheticSpec spec =
        resel::SyntheticSpecFromJson(spec_json);
    resel::WriteSyntheticDataset(spec,
                                 form == RESEL_SYNTH_PER_TOKEN_JSD
                                     ? resel::SyntheticForm::kPerTokenJsd
                                     : resel::SyntheticForm::kProbabilities,
                                 out_dir);
  });
}

resel_status resel_jsd(const double* p, const double* q, size_t n, double* out) {
  return Guard([&] {
    RequireArg(p, "p");
    RequireArg(q, "q");
    RequireArg(out, "out");
    const std::span<const double> ps(p, n);
    const std::span<const double> qs(q, n);
    RequireDistribution(ps, "p");
    RequireDistribution(qs, "q");
    *out = resel::JensenShannon(ps, qs);
  });
}

}  // extern "C"
