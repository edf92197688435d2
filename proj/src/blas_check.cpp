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

#include "blas_check.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <vector>

#include <cblas.h>

#include "resel/error.hpp"
#include "resel/random.hpp"

// OpenBLAS dynamic-architecture hooks. Weak, so any other BLAS still links
// and simply skips kernel reselection.
extern "C" {
void gotoblas_dynamic_init(void) __attribute__((weak));
void gotoblas_dynamic_quit(void) __attribute__((weak));
char* openblas_get_corename(void) __attribute__((weak));
}

namespace resel {

namespace {

constexpr int kCheckSize = 288;

std::mutex g_mutex;
bool g_checked = false;
std::string g_description = "BLAS";

bool GemmMatchesReference() {
  const int n = kCheckSize;
  const auto nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::vector<double> a(nn);
  std::vector<double> b(nn);
  SplitMix64 rng(0x5eedULL);
  for (double& v : a) v = rng.UnitOpenClosed() - 0.5;
  for (double& v : b) v = rng.UnitOpenClosed() - 0.5;
  std::vector<double> c(nn, 0.0);
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0,
              a.data(), n, b.data(), n, 0.0, c.data(), n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double ref = 0.0;
      for (int l = 0; l < n; ++l) {
        ref += a[static_cast<std::size_t>(l) * n + i] *
               b[static_cast<std::size_t>(j) * n + l];
      }
      if (!(std::abs(c[static_cast<std::size_t>(j) * n + i] - ref) <= 1e-9)) {
        return false;
      }
    }
  }
  return true;
}

std::string CoreName() {
  if (openblas_get_corename == nullptr) return "";
  const char* name = openblas_get_corename();
  return name ? name : "";
}

// Kernel sets to fall back to, most capable first, filtered by what the CPU
// reports.
std::vector<const char*> FallbackCores() {
  std::vector<const char*> out;
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq") &&
      __builtin_cpu_supports("avx512bw") && __builtin_cpu_supports("avx512vl")) {
    out.push_back("SkylakeX");
  }
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    out.push_back("Haswell");
  }
  if (__builtin_cpu_supports("avx")) out.push_back("Sandybridge");
  out.push_back("Nehalem");
  return out;
}

bool Reselect(const char* core) {
  const char* previous = std::getenv("OPENBLAS_CORETYPE");
  const std::optional<std::string> saved =
      previous ? std::optional<std::string>(previous) : std::nullopt;
  setenv("OPENBLAS_CORETYPE", core, 1);
  gotoblas_dynamic_quit();
  gotoblas_dynamic_init();
  if (saved) {
    setenv("OPENBLAS_CORETYPE", saved->c_str(), 1);
  } else {
    unsetenv("OPENBLAS_CORETYPE");
  }
  return GemmMatchesReference();
}

}  // namespace

void EnsureReliableBlas() {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_checked) return;
  const std::string detected = CoreName();
  if (GemmMatchesReference()) {
    g_description = detected.empty() ? "BLAS" : "OpenBLAS " + detected;
    g_checked = true;
    return;
  }
  if (gotoblas_dynamic_init != nullptr && gotoblas_dynamic_quit != nullptr) {
    for (const char* core : FallbackCores()) {
      if (Reselect(core)) {
        g_description = "OpenBLAS " + CoreName() + " (" + detected +
                        " kernels failed the self-test)";
        g_checked = true;
        return;
      }
    }
  }
  ThrowNumerical("the BLAS library failed its matrix-product self-test" +
                 (detected.empty() ? std::string() : " (kernels " + detected + ")"));
}

std::string BlasBackendDescription() {
  std::lock_guard<std::mutex> lock(g_mutex);
  return g_description;
}

}  // namespace resel
