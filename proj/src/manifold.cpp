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

#include "resel/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "blas_check.hpp"
#include "resel/error.hpp"

namespace resel {

namespace {

using Index = Eigen::Index;

// Eigenvalues of a normalized Laplacian lie in [0, 2]; anything outside
// this slack is a solver failure rather than rounding.
constexpr double kSpectrumSlack = 1e-8;
constexpr double kLogTimeStep = 1e-4;

}  // namespace

double MedianPairwiseDistance(const DistanceMatrix& distances) {
  const Index n = distances.values.rows();
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) upper.push_back(distances.values(i, j));
  }
  if (upper.empty()) ThrowNumerical("median distance needs at least two points");
  const std::size_t mid = upper.size() / 2;
  std::nth_element(upper.begin(), upper.begin() + static_cast<long>(mid),
                   upper.end());
  const double hi = upper[mid];
  if (upper.size() % 2 == 1) return hi;
  const double lo = *std::max_element(upper.begin(),
                                      upper.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

DistanceMatrix PairwiseDistances(const Eigen::MatrixXd& points) {
  const Index n = points.rows();
  if (n < 2) ThrowNumerical("pairwise distances need at least two points");
  const Eigen::MatrixXd cols = points.transpose();
  DistanceMatrix out;
  out.values = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double d = (cols.col(i) - cols.col(j)).norm();
      out.values(i, j) = d;
      out.values(j, i) = d;
    }
  }
  return out;
}

AdjacencyMatrix BuildAdjacency(const DistanceMatrix& distances,
                               std::optional<double> sigma) {
  AdjacencyMatrix out;
  out.sigma = sigma ? *sigma : MedianPairwiseDistance(distances);
  if (!(out.sigma > 0.0) || !std::isfinite(out.sigma)) {
    ThrowNumerical("degenerate geometry: kernel bandwidth is " +
                   std::to_string(out.sigma));
  }
  const double scale = -1.0 / (2.0 * out.sigma * out.sigma);
  const Index n = distances.values.rows();
  out.values.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values(j, j) = 1.0;
    for (Index i = 0; i < j; ++i) {
      const double dij = distances.values(i, j);
      const double a = std::exp(scale * dij * dij);
      out.values(i, j) = a;
      out.values(j, i) = a;
    }
  }
  return out;
}

Laplacian NormalizedLaplacian(const AdjacencyMatrix& adjacency) {
  const Eigen::MatrixXd& a = adjacency.values;
  const Index n = a.rows();
  Laplacian out;
  out.degrees = a.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (!(out.degrees(i) > 0.0)) {
      ThrowNumerical("zero-degree vertex " + std::to_string(i));
    }
    inv_sqrt(i) = 1.0 / std::sqrt(out.degrees(i));
  }
  out.values.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double v =
          (i == j ? 1.0 : 0.0) - inv_sqrt(i) * a(i, j) * inv_sqrt(j);
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

KernelSpectrum SpectralDecompose(const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() == 0) {
    ThrowNumerical("spectral decomposition needs a non-empty square matrix");
  }
  EnsureReliableBlas();
  const Index n = laplacian.rows();
  KernelSpectrum out;
  out.eigenvectors = laplacian;
  out.eigenvalues.resize(n);
  // Divide-and-conquer symmetric solver; eigenvalues come back ascending.
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
      out.eigenvectors.data(), static_cast<lapack_int>(n),
      out.eigenvalues.data());
  if (info != 0) {
    ThrowNumerical("symmetric eigensolver failed (info = " +
                   std::to_string(info) + ")");
  }
  for (Index j = 0; j < out.eigenvalues.size(); ++j) {
    double& mu = out.eigenvalues(j);
    if (mu < -kSpectrumSlack || mu > 2.0 + kSpectrumSlack) {
      ThrowNumerical("Laplacian eigenvalue " + std::to_string(mu) +
                     " outside [0, 2]");
    }
    mu = std::clamp(mu, 0.0, 2.0);

    auto v = out.eigenvectors.col(j);
    for (Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > kSignTolerance) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
  }
  // The smallest eigenvalue of a normalized Laplacian is exactly zero.
  out.eigenvalues(0) = 0.0;
  return out;
}

Eigen::VectorXd DiffusionEigenvalues(const KernelSpectrum& spectrum, double t) {
  if (!(t > 0.0)) ThrowNumerical("diffusion time must be positive");
  return (-t * spectrum.eigenvalues.array()).exp().matrix();
}

std::vector<double> DefaultTimeGrid() {
  std::vector<double> grid(25);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::exp2(-6.0 + 0.5 * static_cast<double>(i));
  }
  return grid;
}

double SpectralGapCriterion(const KernelSpectrum& spectrum, double t) {
  if (spectrum.size() < 2) ThrowNumerical("lambda_2 needs at least two points");
  const auto log_lambda2 = [&](double s) {
    return std::log(DiffusionEigenvalues(spectrum, s)(1));
  };
  const double up = t * std::exp(kLogTimeStep);
  const double down = t * std::exp(-kLogTimeStep);
  return (log_lambda2(up) - log_lambda2(down)) / (2.0 * kLogTimeStep);
}

double SelectDiffusionTime(const KernelSpectrum& spectrum,
                           std::span<const double> grid) {
  if (grid.empty()) ThrowConfig("diffusion time grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      ThrowConfig("diffusion times must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      ThrowConfig("diffusion time grid must be strictly ascending");
    }
  }
  double best_t = grid[0];
  double best = SpectralGapCriterion(spectrum, grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double c = SpectralGapCriterion(spectrum, grid[i]);
    if (c > best) {
      best = c;
      best_t = grid[i];
    }
  }
  return best_t;
}

ManifoldCoords ManifoldEmbed(const KernelSpectrum& spectrum, std::size_t d,
                             double diffusion_time) {
  const std::size_t n = spectrum.size();
  if (d < 1 || d >= n) {
    ThrowConfig("manifold dimension d = " + std::to_string(d) +
                " must satisfy 1 <= d < N = " + std::to_string(n));
  }
  const Eigen::VectorXd lambda = DiffusionEigenvalues(spectrum, diffusion_time);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return lambda(a) > lambda(b); });

  ManifoldCoords out;
  out.diffusion_time = diffusion_time;
  out.coords.resize(static_cast<Index>(n), static_cast<Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    out.coords.col(static_cast<Index>(j)) = spectrum.eigenvectors.col(order[j]);
  }
  return out;
}

}  // namespace resel
