#include <cmath>

#include "doctest.h"
#include "niplab/errors.hpp"
#include "niplab/fourier.hpp"
#include "niplab/fring_tenney.hpp"
#include "niplab/operators.hpp"
#include "niplab/spectra.hpp"

using namespace niplab;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

const GridSpec grid = evolution_default_grid();

FTParams generic() {
  FTParams p;
  p.alpha = Schedule::parse("poly:0,0.1");
  p.beta = Schedule::parse("poly:0,0,0.05");
  p.gamma = Schedule::parse("poly:0,0.2");
  p.delta = Schedule::parse("poly:0.3,1");
  return p;
}

}  // namespace

TEST_CASE("exponential-product Dyson map") {
  const MatrixXcd id = MatrixXcd::Identity(grid.n_points(), grid.n_points());
  SUBCASE("zero parameters") {
    CHECK((build_ft_dyson(FTParams{}, 0.3, grid).entries - id).norm() < 1e-13);
  }
  SUBCASE("momentum-only map") {
    FTParams p;
    p.beta = Schedule::constant(0.01);
    p.gamma = Schedule::constant(0.2);
    p.delta = Schedule::constant(-0.4);
    const MatrixXcd f = dft_matrix(grid);
    const MatrixXcd diag = f * build_ft_dyson(p, 0.0, grid).entries * f.adjoint();
    const Eigen::VectorXd k = grid.wavenumbers();
    // Entries span e^{+-20}; the dense round trip is accurate relative to the largest.
    const double scale = diag.cwiseAbs().maxCoeff();
    double off = 0.0;
    double err = 0.0;
    for (Eigen::Index m = 0; m < diag.rows(); ++m) {
      const cplx expected = std::exp(0.01 * std::pow(k(m), 3) + cplx(0.0, 0.2 * k(m) * k(m) - 0.4 * k(m)));
      err = std::max(err, std::abs(diag(m, m) - expected));
      for (Eigen::Index n = 0; n < diag.cols(); ++n)
        if (n != m) off = std::max(off, std::abs(diag(m, n)));
    }
    CHECK(err < 1e-14 * scale);
    CHECK(off < 1e-14 * scale);
  }
  SUBCASE("translation") {
    FTParams p;
    p.delta = Schedule::constant(0.75);
    const VectorXcd v = hermite_probe(grid, 1).position.col(0);
    const VectorXcd shifted = build_ft_dyson(p, 0.0, grid).entries * v;
    const Eigen::VectorXd x = grid.points();
    VectorXcd expected(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) expected(j) = std::exp(-0.5 * std::pow(x(j) + 0.75, 2));
    expected *= v(grid.n_points() / 2);
    CHECK((shifted - expected).norm() / expected.norm() < 1e-6);
  }
  SUBCASE("inverse") {
    const FTParams p = generic();
    const MatrixXcd prod = build_ft_dyson(p, 0.1, grid).entries * build_ft_dyson_inverse(p, 0.1, grid).entries;
    CHECK((prod - id).norm() / id.norm() < 1e-10);
  }
  SUBCASE("overflow guard") {
    FTParams p;
    p.alpha = Schedule::constant(200.0);
    CHECK_THROWS_AS(build_ft_dyson(p, 0.0, grid), Error);
    FTParams q;
    q.beta = Schedule::constant(1.0);
    CHECK_THROWS_AS(build_ft_dyson(q, 0.0, grid), Error);
  }
}

TEST_CASE("analytic Coriolis force") {
  SUBCASE("constant schedules") {
    FTParams p;
    p.alpha = Schedule::constant(0.1);
    p.delta = Schedule::constant(0.3);
    CHECK(ft_coriolis_analytic(p, 0.5, grid).entries.norm() == 0.0);
  }
  SUBCASE("linear beta") {
    FTParams p;
    p.beta = Schedule::parse("poly:0,1");
    const MatrixXcd pm = build_momentum(grid).entries;
    const MatrixXcd expected = cplx(0.0, 1.0) * pm * pm * pm;
    CHECK(relative_difference(ft_coriolis_analytic(p, 0.5, grid).entries, expected) < 1e-12);
    // Its spectrum is purely imaginary.
    const Spectrum s = eigensolve(ft_coriolis_analytic(p, 0.5, grid), 4, ArtifactFilter{.enabled = false});
    for (cplx e : s.eigenvalues) CHECK(std::abs(e.real()) < 1e-8 * std::max(1.0, std::abs(e)));
  }
  SUBCASE("second-order finite-difference agreement") {
    for (double h : {1e-3, 1e-4}) {
      const CoriolisConvergence c = ft_validate_coriolis(generic(), 0.25, h, grid);
      CAPTURE(h);
      CAPTURE(c.residual_h);
      CHECK(c.ratio > 3.5);
      CHECK(c.ratio < 4.5);
    }
  }
}

TEST_CASE("mapped generator") {
  const GridSpec g(256, 8.0);
  SUBCASE("massless case reproduces the mapped quartic") {
    for (double lambda : {0.5, 1.0}) {
      const OperatorMatrix gen = ft_generator(0.0, 16.0 * lambda * lambda, g);
      CHECK(relative_difference(gen.entries, build_jm_mapped(lambda, g).entries) < 1e-12);
      CHECK(relative_difference(gen.entries, build_njm_mapped(lambda * lambda, g).entries) < 1e-12);
    }
  }
  SUBCASE("quadratic contour image") {
    const double tiny = 1e-300;
    const OperatorMatrix kinetic = ft_generator(0.0, tiny, g);
    const Eigen::VectorXd x = g.points();
    // (m/4) z^2 with z^2 = -4 - 4iX.
    for (double m : {1.0, 4.0}) {
      const MatrixXcd potential = ft_generator(m, tiny, g).entries - kinetic.entries;
      for (Eigen::Index j = 0; j < x.size(); ++j)
        CHECK(std::abs(potential(j, j) - (m / 4.0) * cplx(-4.0, -4.0 * x(j))) < 1e-12);
      CHECK((potential - MatrixXcd(potential.diagonal().asDiagonal())).norm() == 0.0);
    }
  }
  SUBCASE("Hermitian and anti-Hermitian split") {
    const OperatorMatrix gen = ft_generator(1.0, 2.0, g);
    const MatrixXcd herm = 0.5 * (gen.entries + gen.entries.adjoint());
    const MatrixXcd anti = 0.5 * (gen.entries - gen.entries.adjoint());
    const Eigen::VectorXd x = g.points();
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      // The diagonals come from the kinetic part plus the contour potential.
      const cplx kin_h = 0.5 * (ft_generator(0.0, 1e-300, g).entries(j, j) + std::conj(ft_generator(0.0, 1e-300, g).entries(j, j)));
      CHECK(std::abs(herm(j, j) - kin_h - (-1.0 - 2.0 * (1.0 - x(j) * x(j)))) < 1e-9);
    }
    CHECK(anti.norm() > 0.0);
  }
  CHECK_THROWS_AS(ft_generator(0.0, 0.0, g), Error);
}

TEST_CASE("sigma constraints") {
  SUBCASE("constant sigma") {
    const FTConstraintOutput c = ft_constraints(Schedule::constant(2.0), 0.5, 0.3);
    CHECK(c.lambda_sq == doctest::Approx(1.0 / 32.0));
    CHECK(c.mass == doctest::Approx(0.5 / 4.0));
  }
  SUBCASE("quadratic sigma has a constant numerator") {
    const double k0 = 1.5, k1 = 0.4, k2 = 0.7, c2 = 0.2;
    const Schedule s = Schedule::polynomial({k0, k1, k2});
    for (double t : {0.0, 0.3, 0.8}) {
      const double sv = s.value(t);
      const double numerator = ft_constraints(s, c2, t).mass * 4.0 * sv * sv;
      CHECK(numerator == doctest::Approx(4.0 * c2 + k1 * k1 - 4.0 * k0 * k2));
    }
  }
  SUBCASE("non-positive sigma") {
    try {
      (void)ft_constraints(Schedule::parse("poly:0,1"), 0.0, 0.0);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
    }
  }
}

TEST_CASE("massless c2") {
  CHECK(ft_massless_c2({1.0, 0.0, 0.0}).c2 == 0.0);
  const MasslessCheck a = ft_massless_c2({1.0, 1.0, 1.0});
  CHECK(a.c2 == doctest::Approx(0.75));
  CHECK(a.max_mass < 1e-12);
  CHECK(a.samples == 100);
  const MasslessCheck b = ft_massless_c2({2.0, 0.0, 1.0});
  CHECK(b.c2 == doctest::Approx(2.0));
  CHECK(b.max_mass < 1e-12);
}

TEST_CASE("assembled Hamiltonian") {
  SUBCASE("stationary limit") {
    FTParams p;
    p.alpha = Schedule::constant(0.05);
    const FTHamiltonian h = ft_hamiltonian(p, 0.0, 1.0, 0.2, grid);
    CHECK(h.h.entries == h.generator.entries);
  }
  SUBCASE("H - Sigma recovers G") {
    const FTHamiltonian h = ft_hamiltonian(generic(), 0.5, 2.0, 0.3, grid);
    CHECK(relative_difference((h.h - h.coriolis).entries, h.generator.entries) < 1e-15);
    CHECK(std::isfinite(h.quasi_hermiticity));
  }
}
