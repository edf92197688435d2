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


#include <doctest.h>

#include <cmath>
#include <random>

#include "resel/manifold.hpp"
#include "test_util.hpp"

namespace resel {
namespace {

using test::KindOf;

Eigen::MatrixXd RandomPoints(int n, int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = nd(rng);
  }
  return x;
}

KernelSpectrum SpectrumOf(const Eigen::MatrixXd& points) {
  return SpectralDecompose(
      NormalizedLaplacian(BuildAdjacency(PairwiseDistances(points))).values);
}

TEST_CASE("pairwise distances") {
  Eigen::MatrixXd same(2, 3);
  same << 1, 2, 3, 1, 2, 3;
  CHECK(PairwiseDistances(same).values.isZero(0.0));

  Eigen::MatrixXd line(2, 1);
  line << 0, 3;
  CHECK(PairwiseDistances(line).values(0, 1) == 3.0);

  const DistanceMatrix d = PairwiseDistances(RandomPoints(20, 5, 1));
  CHECK(d.values == d.values.transpose());
  CHECK(d.values.diagonal().isZero(0.0));
  // Spot check against a direct evaluation.
  const Eigen::MatrixXd x = RandomPoints(20, 5, 1);
  CHECK(d.values(3, 17) == doctest::Approx((x.row(3) - x.row(17)).norm()).epsilon(1e-12));

  CHECK(KindOf([] { PairwiseDistances(Eigen::MatrixXd(1, 2)); }) == ErrorKind::kNumerical);
}

TEST_CASE("adjacency: Gaussian kernel with median bandwidth") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0, 1, 3;  // distances 1, 3, 2
  const DistanceMatrix d = PairwiseDistances(pts);
  CHECK(MedianPairwiseDistance(d) == 2.0);
  const AdjacencyMatrix a = BuildAdjacency(d);
  CHECK(a.sigma == 2.0);
  CHECK(a.values(0, 2) == doctest::Approx(std::exp(-9.0 / 8.0)).epsilon(1e-14));
  // D_ij = sigma gives exp(-1/2).
  CHECK(a.values(1, 2) == doctest::Approx(0.60653066).epsilon(1e-8));
  CHECK(a.values.diagonal().isOnes(0.0));
  CHECK(a.values == a.values.transpose());

  const AdjacencyMatrix fixed = BuildAdjacency(d, 1.0);
  CHECK(fixed.values(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

  Eigen::MatrixXd same = Eigen::MatrixXd::Zero(3, 2);
  CHECK(KindOf([&] { BuildAdjacency(PairwiseDistances(same)); }) == ErrorKind::kNumerical);
}

TEST_CASE("normalized Laplacian fixtures") {
  AdjacencyMatrix ones{Eigen::MatrixXd::Ones(2, 2), 1.0};
  const Laplacian l = NormalizedLaplacian(ones);
  CHECK(l.degrees(0) == 2.0);
  CHECK(l.degrees(1) == 2.0);
  Eigen::MatrixXd expect(2, 2);
  expect << 0.5, -0.5, -0.5, 0.5;
  CHECK(l.values.isApprox(expect, 1e-15));

  AdjacencyMatrix ident{Eigen::MatrixXd::Identity(2, 2), 1.0};
  CHECK(NormalizedLaplacian(ident).values.isZero(0.0));

  const KernelSpectrum sp = SpectrumOf(RandomPoints(40, 4, 2));
  CHECK(sp.eigenvalues.minCoeff() >= 0.0);
  CHECK(sp.eigenvalues.maxCoeff() <= 2.0 + 1e-8);
}

TEST_CASE("spectral decomposition") {
  Eigen::MatrixXd l(2, 2);
  l << 0.5, -0.5, -0.5, 0.5;
  const KernelSpectrum two = SpectralDecompose(l);
  CHECK(two.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(two.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));

  const KernelSpectrum zero = SpectralDecompose(Eigen::MatrixXd::Zero(3, 3));
  CHECK(zero.eigenvalues.isZero(0.0));
  CHECK((zero.eigenvectors.transpose() * zero.eigenvectors)
            .isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-12));

  // Large enough to exercise blocked BLAS kernels.
  for (int n : {60, 250}) {
    const Eigen::MatrixXd lap =
        NormalizedLaplacian(BuildAdjacency(PairwiseDistances(RandomPoints(n, 6, 3))))
            .values;
    const KernelSpectrum sp = SpectralDecompose(lap);
    const Eigen::MatrixXd& phi = sp.eigenvectors;
    const Eigen::MatrixXd rebuilt = phi * sp.eigenvalues.asDiagonal() * phi.transpose();
    CHECK((rebuilt - lap).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((phi.transpose() * phi - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(sp.eigenvalues(0) == 0.0);
    for (int i = 1; i < n; ++i) CHECK(sp.eigenvalues(i) >= sp.eigenvalues(i - 1));
    // Sign convention: first clearly nonzero component positive.
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (std::abs(phi(i, j)) > kSignTolerance) {
          CHECK(phi(i, j) > 0.0);
          break;
        }
      }
    }
  }
}

TEST_CASE("diffusion eigenvalues") {
  KernelSpectrum sp;
  sp.eigenvalues = Eigen::Vector3d(0.0, 1.0, 1.5);
  sp.eigenvectors = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd lambda = DiffusionEigenvalues(sp, std::log(2.0));
  CHECK(lambda(0) == 1.0);
  CHECK(lambda(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lambda(2) > 0.0);
  CHECK(lambda(2) < lambda(1));
  CHECK(KindOf([&] { DiffusionEigenvalues(sp, 0.0); }).has_value());
  CHECK(KindOf([&] { DiffusionEigenvalues(sp, -1.0); }).has_value());
}

TEST_CASE("diffusion time selection") {
  const std::vector<double> grid = DefaultTimeGrid();
  REQUIRE(grid.size() == 25);
  CHECK(grid.front() == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(grid.back() == doctest::Approx(64.0).epsilon(1e-15));
  CHECK(grid[12] == doctest::Approx(1.0).epsilon(1e-15));

  KernelSpectrum sp;
  sp.eigenvalues = Eigen::Vector3d(0.0, 0.7, 1.2);
  sp.eigenvectors = Eigen::MatrixXd::Identity(3, 3);
  // Analytically the criterion is -mu_2 t.
  for (double t : {0.1, 1.0, 5.0}) {
    CHECK(SpectralGapCriterion(sp, t) == doctest::Approx(-0.7 * t).epsilon(1e-7));
  }
  CHECK(SelectDiffusionTime(sp, grid) == grid.front());

  KernelSpectrum disconnected = sp;
  disconnected.eigenvalues = Eigen::Vector3d(0.0, 0.0, 1.0);
  CHECK(SpectralGapCriterion(disconnected, 2.0) == 0.0);
  CHECK(SelectDiffusionTime(disconnected, grid) == grid.front());

  const std::vector<double> one = {3.0};
  CHECK(SelectDiffusionTime(sp, one) == 3.0);
  const std::vector<double> bad = {1.0, 0.5};
  CHECK(KindOf([&] { SelectDiffusionTime(sp, bad); }) == ErrorKind::kConfig);
}

TEST_CASE("manifold embedding") {
  const KernelSpectrum sp = SpectrumOf(RandomPoints(100, 8, 4));
  const ManifoldCoords c = ManifoldEmbed(sp, 16, 0.5);
  CHECK(c.coords.rows() == 100);
  CHECK(c.coords.cols() == 16);
  CHECK(c.diffusion_time == 0.5);
  CHECK(c.coords == sp.eigenvectors.leftCols(16));
  CHECK(KindOf([&] { ManifoldEmbed(sp, 100, 1.0); }) == ErrorKind::kConfig);
  CHECK(KindOf([&] { ManifoldEmbed(sp, 0, 1.0); }) == ErrorKind::kConfig);

  // t-invariance: smallest and largest grid time give identical coordinates.
  const std::vector<double> grid = DefaultTimeGrid();
  CHECK(ManifoldEmbed(sp, 8, grid.front()).coords == ManifoldEmbed(sp, 8, grid.back()).coords);
}

TEST_CASE("two disconnected components are recoverable from two eigenvectors") {
  // Block-diagonal adjacency: {0,1,2} and {3,4}.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a.topLeftCorner(3, 3).setConstant(0.8);
  a.bottomRightCorner(2, 2).setConstant(0.6);
  a.diagonal().setOnes();
  const KernelSpectrum sp = SpectralDecompose(NormalizedLaplacian({a, 1.0}).values);
  CHECK(sp.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(sp.eigenvalues(1)) < 1e-12);
  const Eigen::MatrixXd e = ManifoldEmbed(sp, 2, 1.0).coords;
  // Rows of one component are parallel to each other and orthogonal to the
  // other component's rows.
  const auto cosine = [&](int i, int j) {
    return e.row(i).dot(e.row(j)) / (e.row(i).norm() * e.row(j).norm());
  };
  CHECK(cosine(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cosine(0, 2) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cosine(3, 4) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(cosine(0, 3)) < 1e-9);
}

TEST_CASE("rigid motion invariance and determinism") {
  const Eigen::MatrixXd x = RandomPoints(30, 3, 5);
  // Rotation from a QR factorization plus a translation.
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(RandomPoints(3, 3, 6)).householderQ();
  Eigen::MatrixXd moved = x * q.transpose();
  moved.rowwise() += Eigen::RowVector3d(4.0, -2.0, 7.5);

  const DistanceMatrix d0 = PairwiseDistances(x);
  const DistanceMatrix d1 = PairwiseDistances(moved);
  CHECK((d0.values - d1.values).cwiseAbs().maxCoeff() < 1e-12);
  const Laplacian l0 = NormalizedLaplacian(BuildAdjacency(d0));
  const Laplacian l1 = NormalizedLaplacian(BuildAdjacency(d1));
  CHECK((l0.values - l1.values).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd c0 = ManifoldEmbed(SpectralDecompose(l0.values), 4, 1.0).coords;
  const Eigen::MatrixXd c1 = ManifoldEmbed(SpectralDecompose(l1.values), 4, 1.0).coords;
  CHECK((c0 - c1).cwiseAbs().maxCoeff() < 1e-8);

  CHECK(ManifoldEmbed(SpectrumOf(x), 4, 1.0).coords == c0);
}

}  // namespace
}  // namespace resel
