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

#include "resel/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <cblas.h>

#include "blas_check.hpp"
#include "resel/error.hpp"
#include "resel/random.hpp"

namespace resel {

namespace {

using Index = Eigen::Index;

Eigen::MatrixXd RandomFactor(Index rows, Index cols, double scale,
                             SplitMix64& rng) {
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill order is part of the seeded contract.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = scale * rng.UnitOpenClosed();
  }
  return m;
}

// out = S^T f for the dense N x N similarity; the N x k products dominate
// the factorization cost, so they go straight to BLAS.
void MultiplyS(const Eigen::MatrixXd& s, bool transpose,
               const Eigen::MatrixXd& f, Eigen::MatrixXd& out) {
  out.resize(s.rows(), f.cols());
  cblas_dgemm(CblasColMajor, transpose ? CblasTrans : CblasNoTrans,
              CblasNoTrans, static_cast<int>(s.rows()),
              static_cast<int>(f.cols()), static_cast<int>(s.cols()), 1.0,
              s.data(), static_cast<int>(s.rows()), f.data(),
              static_cast<int>(f.rows()), 0.0, out.data(),
              static_cast<int>(out.rows()));
}

// ||S - W H^T||_F from ||S||_F^2, S H and the two Gram matrices.
double FrobeniusError(double s_norm2, const Eigen::MatrixXd& w,
                      const Eigen::Ref<const Eigen::MatrixXd>& sh,
                      const Eigen::MatrixXd& wtw, const Eigen::MatrixXd& hth) {
  const double cross = (w.array() * sh.array()).sum();
  const double quad = (wtw.array() * hth.array()).sum();
  return std::sqrt(std::max(0.0, s_norm2 - 2.0 * cross + quad));
}

struct JobState {
  NmfFactors f;
  double previous = -1.0;
  Index offset = 0;  // first column in the stacked products
};

// Stacks W or H of the given jobs side by side and records each offset.
void Stack(std::vector<JobState>& states, const std::vector<std::size_t>& active,
           bool use_w, Eigen::MatrixXd& out) {
  Index cols = 0;
  for (std::size_t j : active) cols += states[j].f.w.cols();
  out.resize(states[active.front()].f.w.rows(), cols);
  Index at = 0;
  for (std::size_t j : active) {
    const Eigen::MatrixXd& m = use_w ? states[j].f.w : states[j].f.h;
    out.middleCols(at, m.cols()) = m;
    states[j].offset = at;
    at += m.cols();
  }
}

}  // namespace

SimilarityMatrix BuildSimilarity(const ManifoldCoords& coords) {
  const AdjacencyMatrix a = BuildAdjacency(PairwiseDistances(coords.coords));
  return {a.values, a.sigma};
}

std::vector<NmfFactors> NmfFactorizeBatch(const Eigen::MatrixXd& s,
                                          const std::vector<NmfJob>& jobs,
                                          const NmfOptions& options) {
  const Index n = s.rows();
  for (const NmfJob& job : jobs) {
    if (job.k < 1) ThrowConfig("NMF rank must be at least 1");
    if (static_cast<Index>(job.k) > n) {
      ThrowConfig("NMF rank " + std::to_string(job.k) + " exceeds N = " +
                  std::to_string(n));
    }
  }
  if (jobs.empty()) return {};
  EnsureReliableBlas();
  const double scale = s.mean();
  const double s_norm2 = s.squaredNorm();

  std::vector<JobState> states(jobs.size());
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Index kk = static_cast<Index>(jobs[j].k);
    SplitMix64 rng(jobs[j].seed);
    NmfFactors& f = states[j].f;
    f.seed = jobs[j].seed;
    f.w = RandomFactor(n, kk, scale, rng);
    f.h = RandomFactor(n, kk, scale, rng);
    active.push_back(j);
  }

  Eigen::MatrixXd stacked;
  Eigen::MatrixXd product;
  while (!active.empty()) {
    Stack(states, active, false, stacked);
    MultiplyS(s, false, stacked, product);
    std::vector<std::size_t> still;
    for (std::size_t j : active) {
      JobState& st = states[j];
      NmfFactors& f = st.f;
      const auto sh = product.middleCols(st.offset, f.h.cols());
      const Eigen::MatrixXd hth = f.h.transpose() * f.h;
      const Eigen::MatrixXd wtw = f.w.transpose() * f.w;
      const double err = FrobeniusError(s_norm2, f.w, sh, wtw, hth);
      f.trace.push_back(err);
      f.error = err;
      if (st.previous >= 0.0) {
        const double change =
            st.previous > 0.0 ? std::abs(st.previous - err) / st.previous : 0.0;
        if (change < options.rel_tol) {
          f.converged = true;
          continue;
        }
      }
      if (f.iterations >= options.max_iters) continue;
      st.previous = err;
      const Eigen::MatrixXd w_den = f.w * hth;
      f.w = (f.w.array() * sh.array() / w_den.array().max(kNmfFloor))
                .max(kNmfFloor)
                .matrix();
      still.push_back(j);
    }
    active = std::move(still);
    if (active.empty()) break;

    Stack(states, active, true, stacked);
    MultiplyS(s, true, stacked, product);
    for (std::size_t j : active) {
      NmfFactors& f = states[j].f;
      const auto sw = product.middleCols(states[j].offset, f.w.cols());
      const Eigen::MatrixXd h_den = f.h * (f.w.transpose() * f.w);
      f.h = (f.h.array() * sw.array() / h_den.array().max(kNmfFloor))
                .max(kNmfFloor)
                .matrix();
      ++f.iterations;
    }
  }

  std::vector<NmfFactors> out;
  out.reserve(states.size());
  for (JobState& st : states) out.push_back(std::move(st.f));
  return out;
}

NmfFactors NmfFactorize(const Eigen::MatrixXd& s, std::size_t k,
                        std::uint64_t seed, const NmfOptions& options) {
  return std::move(NmfFactorizeBatch(s, {{k, seed}}, options).front());
}

namespace {

// Best-of-restarts factorization for each k in [k_lo, k_hi], one batch.
std::vector<NmfFactors> BestNmfRange(const Eigen::MatrixXd& s,
                                     std::size_t k_lo, std::size_t k_hi,
                                     std::uint64_t seed, std::size_t restarts,
                                     const NmfOptions& options) {
  if (restarts < 1) ThrowConfig("NMF restarts must be at least 1");
  std::vector<NmfJob> jobs;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    for (std::size_t r = 0; r < restarts; ++r) {
      jobs.push_back({k, DeriveSeed(seed, {k, r})});
    }
  }
  std::vector<NmfFactors> fits = NmfFactorizeBatch(s, jobs, options);
  std::vector<NmfFactors> best;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const std::size_t base = (k - k_lo) * restarts;
    std::size_t pick = base;
    for (std::size_t r = 1; r < restarts; ++r) {
      if (fits[base + r].error < fits[pick].error) pick = base + r;
    }
    best.push_back(std::move(fits[pick]));
  }
  return best;
}

}  // namespace

NmfFactors BestNmf(const Eigen::MatrixXd& s, std::size_t k, std::uint64_t seed,
                   std::size_t restarts, const NmfOptions& options) {
  return std::move(BestNmfRange(s, k, k, seed, restarts, options).front());
}

ClusterCountResult SelectNumClusters(const SimilarityMatrix& similarity,
                                     std::uint64_t seed,
                                     const ClusterCountOptions& options) {
  const std::size_t n = static_cast<std::size_t>(similarity.values.rows());
  if (options.k_min < 1 || options.k_min > options.k_max ||
      options.k_max > n) {
    ThrowConfig("cluster-count range [" + std::to_string(options.k_min) +
                ", " + std::to_string(options.k_max) +
                "] invalid for N = " + std::to_string(n));
  }
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    ThrowConfig("elbow threshold must lie in (0, 1)");
  }
  const std::size_t width = std::max<std::size_t>(1, options.batch_width);

  ClusterCountResult result;
  std::vector<NmfFactors> fits;
  const auto fit = [&](std::size_t k) -> const NmfFactors& {
    const std::size_t slot = k - options.k_min;
    if (slot >= fits.size()) {
      const std::size_t lo = options.k_min + fits.size();
      const std::size_t hi = std::min(options.k_max, std::max(k, lo + width - 1));
      for (NmfFactors& f : BestNmfRange(similarity.values, lo, hi, seed,
                                        options.restarts, options.nmf)) {
        result.errors.emplace_back(options.k_min + fits.size(), f.error);
        fits.push_back(std::move(f));
      }
    }
    return fits[slot];
  };

  std::size_t chosen = options.k_max;
  for (std::size_t k = options.k_min; k < options.k_max; ++k) {
    const double here = fit(k).error;
    const double next = fit(k + 1).error;
    const double gain = here > 0.0 ? (here - next) / here : 0.0;
    if (gain < options.epsilon) {
      chosen = k;
      break;
    }
  }
  if (options.full_curve) {
    for (std::size_t k = options.k_min; k <= options.k_max; ++k) fit(k);
  } else {
    fit(chosen);
  }
  result.k = chosen;
  result.factors = fits[chosen - options.k_min];
  return result;
}

Clustering ClusteringFromLabels(const std::vector<int>& labels) {
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) ThrowInput("negative cluster label");
    max_label = std::max(max_label, l);
  }
  std::vector<bool> used(static_cast<std::size_t>(max_label + 1), false);
  for (int l : labels) used[static_cast<std::size_t>(l)] = true;
  std::vector<int> remap(used.size(), -1);
  Clustering out;
  for (std::size_t c = 0; c < used.size(); ++c) {
    if (!used[c]) continue;
    remap[c] = static_cast<int>(out.source_column.size());
    out.source_column.push_back(static_cast<int>(c));
  }
  out.members.resize(out.source_column.size());
  out.labels.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = remap[static_cast<std::size_t>(labels[i])];
    out.labels.push_back(c);
    out.members[static_cast<std::size_t>(c)].push_back(i);
  }
  return out;
}

Clustering AssignClusters(const Eigen::MatrixXd& w) {
  std::vector<int> raw(static_cast<std::size_t>(w.rows()));
  for (Index i = 0; i < w.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < w.cols(); ++j) {
      if (w(i, j) > w(i, best)) best = j;
    }
    raw[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return ClusteringFromLabels(raw);
}

}  // namespace resel
