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

// Diffusion-kernel manifold embedding of sentence embeddings.
//
// Gaussian adjacency A over pairwise Euclidean distances, normalized
// Laplacian L = I - D^-1/2 A D^-1/2 and heat kernel K_t = exp(-t L). K_t shares
// its eigenvectors with L and has eigenvalues exp(-t mu), so the embedding is
// read straight off the spectrum of L.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace resel {

// Symmetric, zero diagonal.
struct DistanceMatrix {
  Eigen::MatrixXd values;
  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

// Symmetric, unit diagonal, entries in (0, 1].
struct AdjacencyMatrix {
  Eigen::MatrixXd values;
  double sigma = 0.0;
};

struct Laplacian {
  Eigen::MatrixXd values;
  Eigen::VectorXd degrees;
};

struct KernelSpectrum {
  // Laplacian eigenvalues, ascending, clamped into [0, 2].
  Eigen::VectorXd eigenvalues;
  // Column j is the unit eigenvector of eigenvalues[j]; the first component
  // with |v| > kSignTolerance is positive.
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const {
    return static_cast<std::size_t>(eigenvalues.size());
  }
};

struct ManifoldCoords {
  Eigen::MatrixXd coords;  // N x d
  double diffusion_time = 0.0;
};

inline constexpr double kSignTolerance = 1e-10;

// Median of the strictly upper triangle.
double MedianPairwiseDistance(const DistanceMatrix& distances);

// Rows of `points` are samples. Requires at least two rows.
DistanceMatrix PairwiseDistances(const Eigen::MatrixXd& points);

// A_ij = exp(-D_ij^2 / (2 sigma^2)). sigma defaults to the median pairwise
// distance; a zero median is a degenerate geometry (kNumerical).
AdjacencyMatrix BuildAdjacency(const DistanceMatrix& distances,
                               std::optional<double> sigma = std::nullopt);

Laplacian NormalizedLaplacian(const AdjacencyMatrix& adjacency);

// Full dense symmetric eigendecomposition with deterministic signs.
KernelSpectrum SpectralDecompose(const Eigen::MatrixXd& laplacian);

// exp(-t mu_i) for each Laplacian eigenvalue, i.e. the heat-kernel spectrum.
Eigen::VectorXd DiffusionEigenvalues(const KernelSpectrum& spectrum, double t);

// 25 log-spaced points from 2^-6 to 2^6.
std::vector<double> DefaultTimeGrid();

// d log(lambda_2(t)) / d log(t) evaluated by a centered difference in log t.
double SpectralGapCriterion(const KernelSpectrum& spectrum, double t);

// Grid argmax of SpectralGapCriterion; ties resolve to the smaller t.
double SelectDiffusionTime(const KernelSpectrum& spectrum,
                           std::span<const double> grid);

// Rows are the eigenvector components for the d largest eigenvalues of
// K_t (unweighted). Requires 1 <= d < N.
ManifoldCoords ManifoldEmbed(const KernelSpectrum& spectrum, std::size_t d,
                             double diffusion_time);

}  // namespace resel
