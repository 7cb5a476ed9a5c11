#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "niplab/errors.hpp"
#include "niplab/fourier.hpp"
#include "niplab/grid.hpp"
#include "niplab/linalg.hpp"

using namespace niplab;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

TEST_CASE("grid geometry") {
  const GridSpec g(8, 4.0);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.momentum_cutoff() == doctest::Approx(std::numbers::pi));
  CHECK(g.point(0) == -4.0);
  CHECK(g.point(7) == doctest::Approx(3.0));
  const Eigen::VectorXd k = g.wavenumbers();
  CHECK(k(4) == doctest::Approx(std::numbers::pi));
  CHECK(k.maxCoeff() == doctest::Approx(std::numbers::pi));
  CHECK(k.minCoeff() > -std::numbers::pi);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec(7, 1.0), Error);
  CHECK_THROWS_AS(GridSpec(16, 0.0), Error);
  CHECK_THROWS_AS(GridSpec(16, -1.0), Error);
  const GridSpec odd(9, 1.0);
  CHECK_THROWS_AS(odd.wavenumbers(), Error);
  try {
    (void)dft_matrix(odd);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_configuration);
  }
}

TEST_CASE("DFT is unitary and maps plane waves to unit vectors") {
  const GridSpec g(32, 3.0);
  const MatrixXcd f = dft_matrix(g);
  CHECK((f * f.adjoint() - MatrixXcd::Identity(32, 32)).norm() < 1e-13);
  const Eigen::VectorXd k = g.wavenumbers();
  const Eigen::VectorXd x = g.points();
  VectorXcd wave(32);
  for (int j = 0; j < 32; ++j) wave(j) = std::polar(1.0, k(5) * x(j)) / std::sqrt(32.0);
  const VectorXcd hat = f * wave;
  CHECK(std::abs(hat(5) - 1.0) < 1e-13);
  CHECK((hat.norm() - 1.0) < 1e-13);
}

TEST_CASE("probe subspace is orthonormal and localized") {
  const GridSpec g(128, 8.0);
  const ProbeSubspace p = hermite_probe(g, 6, 1.0, 0.5);
  CHECK((p.position.adjoint() * p.position - MatrixXcd::Identity(6, 6)).norm() < 1e-12);
  CHECK((to_momentum(g, p.position) - p.momentum).norm() < 1e-12);
  const Eigen::VectorXd x = g.points();
  const Eigen::VectorXd density = p.position.col(0).cwiseAbs2();
  Eigen::Index peak = 0;
  density.maxCoeff(&peak);
  CHECK(std::abs(x(peak) - 0.5) < g.spacing());
}

TEST_CASE("Pade exponential agrees with Eigen's matrix function") {
  MatrixXcd a = MatrixXcd::Random(12, 12) * 3.0;
  const MatrixXcd mine = linalg::expm(a);
  const MatrixXcd ref = a.exp();
  CHECK(relative_difference(mine, ref) < 1e-12);
  CHECK((linalg::expm(MatrixXcd::Zero(5, 5)) - MatrixXcd::Identity(5, 5)).norm() < 1e-15);
  Eigen::VectorXcd d(3);
  d << 1.0, -2.0, cplx(0.5, 1.0);
  const MatrixXcd e = linalg::expm(MatrixXcd(d.asDiagonal()));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(e(i, i) - std::exp(d(i))) < 1e-13 * std::abs(std::exp(d(i))));
}

TEST_CASE("eigen solvers and condition number") {
  MatrixXcd a = MatrixXcd::Random(20, 20);
  const MatrixXcd h = a + a.adjoint();
  const auto herm = linalg::eig_hermitian(h);
  const auto gen = linalg::eig_general(h);
  for (int i = 0; i < 20; ++i) CHECK(std::abs(herm.values(i).imag()) == 0.0);
  CHECK((h * herm.vectors - herm.vectors * herm.values.asDiagonal()).norm() < 1e-12 * h.norm());
  CHECK((a * linalg::eig_general(a).vectors - linalg::eig_general(a).vectors * linalg::eig_general(a).values.asDiagonal()).norm() <
        1e-11 * a.norm());
  CHECK(gen.values.size() == 20);
  Eigen::VectorXcd d(3);
  d << 1.0, 10.0, 100.0;
  CHECK(linalg::condition_number(MatrixXcd(d.asDiagonal())) == doctest::Approx(100.0));
}

TEST_CASE("operator arithmetic checks grid compatibility") {
  const GridSpec a(16, 1.0);
  const GridSpec b(16, 2.0);
  const OperatorMatrix x(MatrixXcd::Identity(16, 16), Basis::position_grid, a);
  const OperatorMatrix y(MatrixXcd::Identity(16, 16), Basis::position_grid, b);
  CHECK_THROWS_AS(x + y, Error);
  CHECK((x + x).entries(0, 0) == cplx(2.0));
  CHECK(hermiticity_residual(MatrixXcd::Zero(3, 3)) == 0.0);
  CHECK(relative_difference(MatrixXcd::Zero(3, 3), MatrixXcd::Zero(3, 3)) == 0.0);
}
