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

// NMF spectral clustering of manifold coordinates.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "resel/manifold.hpp"

namespace resel {

struct SimilarityMatrix {
  Eigen::MatrixXd values;
  double sigma = 0.0;
};

// Gaussian similarity with the median manifold distance as bandwidth.
SimilarityMatrix BuildSimilarity(const ManifoldCoords& coords);

struct NmfOptions {
  std::size_t max_iters = 200;
  double rel_tol = 1e-4;
};

// Entries of W and H never drop below this floor.
inline constexpr double kNmfFloor = 1e-12;

struct NmfFactors {
  Eigen::MatrixXd w;  // N x k
  Eigen::MatrixXd h;  // N x k
  double error = 0.0;  // ||S - W H^T||_F
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  bool converged = false;  // false when max_iters was hit first
  // Frobenius error before each update, then the final error.
  std::vector<double> trace;
};

// Lee-Seung multiplicative updates for min ||S - W H^T||_F^2, W, H >= 0.
// Initial entries are uniform on (0, 1] scaled by mean(S).
NmfFactors NmfFactorize(const Eigen::MatrixXd& s, std::size_t k,
                        std::uint64_t seed, const NmfOptions& options = {});

struct NmfJob {
  std::size_t k = 1;
  std::uint64_t seed = 0;
};

// Runs several independent factorizations in lockstep so each iteration
// streams S once for all of them. Every job follows exactly the update
// sequence NmfFactorize would; results come back in job order.
std::vector<NmfFactors> NmfFactorizeBatch(const Eigen::MatrixXd& s,
                                          const std::vector<NmfJob>& jobs,
                                          const NmfOptions& options = {});

struct ClusterCountOptions {
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  double epsilon = 0.05;
  std::size_t restarts = 3;
  NmfOptions nmf;
  // Evaluate every k in range instead of stopping at the elbow.
  bool full_curve = false;
  // Consecutive k values factorized in one batch. Only speed depends on it,
  // though the reported curve may extend a little past the elbow.
  std::size_t batch_width = 6;
};

struct ClusterCountResult {
  std::size_t k = 0;
  // (k, best-of-restarts error) for every evaluated k, ascending.
  std::vector<std::pair<std::size_t, double>> errors;
  NmfFactors factors;  // best factorization at the chosen k
};

// Best-of-restarts factorization at a fixed k; ties keep the earlier restart.
NmfFactors BestNmf(const Eigen::MatrixXd& s, std::size_t k, std::uint64_t seed,
                   std::size_t restarts, const NmfOptions& options);

// Elbow rule: the smallest k in [k_min, k_max) whose next component improves
// the error by a relative amount below epsilon; k_max if there is none.
ClusterCountResult SelectNumClusters(const SimilarityMatrix& similarity,
                                     std::uint64_t seed,
                                     const ClusterCountOptions& options);

struct Clustering {
  // Cluster index per sample, 0-based and compact.
  std::vector<int> labels;
  // Members of each cluster in ascending sample order.
  std::vector<std::vector<std::size_t>> members;
  // Factor column that produced each compacted cluster.
  std::vector<int> source_column;

  std::size_t k() const { return members.size(); }
};

// Row argmax of W, ties to the lowest column, empty columns removed.
Clustering AssignClusters(const Eigen::MatrixXd& w);

// Builds a Clustering from arbitrary 0-based labels, compacting unused ids
// while keeping their relative order.
Clustering ClusteringFromLabels(const std::vector<int>& labels);

}  // namespace resel
