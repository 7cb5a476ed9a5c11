#include "niplab/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "niplab/errors.hpp"
#include "niplab/fourier.hpp"

namespace niplab {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr cplx I{0.0, 1.0};

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

bool finite(double v) { return std::isfinite(v); }

MatrixXcd kinetic(const GridSpec& grid) {
  const VectorXd k = grid.wavenumbers();
  return fourier_multiplier(grid, k.array().square().matrix().cast<cplx>());
}

MatrixXcd fourier_p(const GridSpec& grid) {
  return fourier_multiplier(grid, grid.wavenumbers().cast<cplx>());
}

/// Kinetic operator plus a diagonal potential sampled on the grid.
OperatorMatrix with_potential(MatrixXcd kin, const VectorXcd& potential, const GridSpec& grid,
                              cplx kinetic_factor = 1.0) {
  MatrixXcd m = kinetic_factor * kin;
  m.diagonal() += potential;
  return OperatorMatrix(std::move(m), Basis::position_grid, grid);
}

VectorXcd shifted_points(const GridSpec& grid, double eps) {
  return grid.points().cast<cplx>().array() - I * eps;
}

/// H0 + H1 of the mapped wrong-sign quartic with lambda^2 -> g.
OperatorMatrix jm_mapped(double g, const GridSpec& grid) {
  const MatrixXcd p = fourier_p(grid);
  const MatrixXcd p2 = kinetic(grid);
  const VectorXd x = grid.points();
  const Eigen::Index n = x.size();

  // X P^2 + P^2 X with X diagonal: row- and column-scaled copies of P^2.
  MatrixXcd xp2 = x.cast<cplx>().asDiagonal() * p2;
  MatrixXcd p2x = p2 * x.cast<cplx>().asDiagonal();

  MatrixXcd h = p2 - 0.5 * p;
  h += 0.5 * I * (xp2 + p2x);
  for (Eigen::Index k = 0; k < n; ++k) {
    h(k, k) += 16.0 * g * (x(k) * x(k) - 1.0) - 32.0 * I * g * x(k);
  }
  return OperatorMatrix(std::move(h), Basis::position_grid, grid);
}

}  // namespace

OperatorMatrix build_position(const GridSpec& grid) {
  MatrixXcd m = MatrixXcd::Zero(grid.n_points(), grid.n_points());
  m.diagonal() = grid.points().cast<cplx>();
  return OperatorMatrix(std::move(m), Basis::position_grid, grid);
}

OperatorMatrix build_momentum(const GridSpec& grid, MomentumScheme scheme) {
  const int n = grid.n_points();
  if (scheme == MomentumScheme::fourier) {
    return OperatorMatrix(fourier_p(grid), Basis::position_grid, grid);
  }
  const double dx = grid.spacing();
  MatrixXcd d = MatrixXcd::Zero(n, n);
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  for (int j = 0; j < n; ++j) {
    if (scheme == MomentumScheme::fd2) {
      d(j, wrap(j + 1)) += 1.0 / (2.0 * dx);
      d(j, wrap(j - 1)) -= 1.0 / (2.0 * dx);
    } else {
      d(j, wrap(j + 1)) += 8.0 / (12.0 * dx);
      d(j, wrap(j - 1)) -= 8.0 / (12.0 * dx);
      d(j, wrap(j + 2)) -= 1.0 / (12.0 * dx);
      d(j, wrap(j - 2)) += 1.0 / (12.0 * dx);
    }
  }
  return OperatorMatrix(-I * d, Basis::position_grid, grid);
}

OperatorMatrix build_kinetic(const GridSpec& grid) {
  return OperatorMatrix(kinetic(grid), Basis::position_grid, grid);
}

Eigen::VectorXd half_line_points(const GridSpec& grid) {
  const int n = grid.n_points();
  const double dr = 2.0 * grid.half_width() / (n + 1);
  VectorXd r(n);
  for (int k = 0; k < n; ++k) r(k) = (k + 1) * dr;
  return r;
}

OperatorMatrix build_aho_radial(double lambda, double j, const GridSpec& grid) {
  require(finite(lambda) && lambda >= 0.0, ErrorCode::domain, "AHO needs lambda >= 0");
  require(finite(j), ErrorCode::domain, "AHO needs a finite j");
  require(j >= 1.0, ErrorCode::unsupported,
          "j < 1 gives an attractive centrifugal singularity, which is not supported");
  const int n = grid.n_points();
  const double big_r = 2.0 * grid.half_width();
  const VectorXd r = half_line_points(grid);

  // Sine series: S(k, m) = sqrt(2/(n+1)) sin(pi (k+1)(m+1)/(n+1)), S = S^T = S^-1.
  Eigen::MatrixXd s(n, n);
  const double norm = std::sqrt(2.0 / (n + 1));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const long prod = static_cast<long>(a + 1) * (b + 1) % (2 * (n + 1));
      s(a, b) = norm * std::sin(std::numbers::pi * prod / (n + 1));
    }
  }
  VectorXd q2(n);
  for (int m = 0; m < n; ++m) {
    const double q = (m + 1) * std::numbers::pi / big_r;
    q2(m) = q * q;
  }
  Eigen::MatrixXd t = s * q2.asDiagonal() * s;
  t = 0.5 * (t + t.transpose());

  Eigen::MatrixXd h = 0.5 * t;
  for (int k = 0; k < n; ++k) {
    const double rk = r(k);
    h(k, k) += 0.5 * ((j * j - 1.0) / (4.0 * rk * rk) + rk * rk) + lambda * lambda * rk * rk * rk * rk;
  }
  return OperatorMatrix(h.cast<cplx>(), Basis::half_line_grid, grid);
}

OperatorMatrix build_qtilde(double lambda, double j, double eps, const GridSpec& grid) {
  require(finite(lambda) && lambda >= 0.0, ErrorCode::domain, "Q~ needs lambda >= 0");
  require(finite(eps) && eps >= 0.0, ErrorCode::domain, "Q~ needs a shift eps >= 0");
  require(finite(j), ErrorCode::domain, "Q~ needs a finite j");
  const VectorXcd r = shifted_points(grid, eps);
  VectorXcd v(r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    const cplx rk = r(k);
    const cplx r2 = rk * rk;
    v(k) = j / 2.0 - I * j * lambda * rk + r2 - 2.0 * I * lambda * r2 * rk - lambda * lambda * r2 * r2;
  }
  return with_potential(kinetic(grid), v, grid);
}

OperatorMatrix build_bb(double lambda, double delta, const GridSpec& grid) {
  require(finite(lambda) && lambda > 0.0, ErrorCode::domain, "BB needs lambda > 0");
  require(finite(delta) && delta >= 0.0 && delta < 2.0, ErrorCode::domain,
          "BB on the real line needs 0 <= delta < 2");
  const VectorXd x = grid.points();
  VectorXcd v(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double xk = x(k);
    // Principal branch: (i x)^delta = |x|^delta exp(i delta pi/2 sign(x)).
    const double sgn = xk > 0 ? 1.0 : (xk < 0 ? -1.0 : 0.0);
    const cplx ix_delta = std::pow(std::abs(xk), delta) * std::polar(1.0, delta * std::numbers::pi / 2.0 * sgn);
    v(k) = lambda * lambda * xk * xk * ix_delta;
  }
  return with_potential(kinetic(grid), v, grid);
}

OperatorMatrix build_jm_mapped(double lambda, const GridSpec& grid) {
  require(finite(lambda) && lambda > 0.0, ErrorCode::domain, "JM needs lambda > 0");
  return jm_mapped(lambda * lambda, grid);
}

OperatorMatrix build_jm_avatar(double lambda, const GridSpec& grid) {
  require(finite(lambda) && lambda > 0.0, ErrorCode::domain, "JM avatar needs lambda > 0");
  const VectorXd x = grid.points();
  VectorXcd v(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double x2 = x(k) * x(k);
    v(k) = -2.0 * lambda * x(k) + 4.0 * lambda * lambda * x2 * x2;
  }
  return with_potential(kinetic(grid), v, grid);
}

OperatorMatrix build_bg(double lambda, double j, double eps, const GridSpec& grid) {
  require(finite(lambda) && lambda >= 0.0, ErrorCode::domain, "BG needs lambda >= 0");
  require(finite(j) && j >= 1.0, ErrorCode::domain, "BG needs j >= 1");
  require(finite(eps), ErrorCode::domain, "BG needs a finite shift");
  require(eps != 0.0, ErrorCode::singular_potential,
          "BG with eps = 0 puts the centrifugal pole on the real grid");
  require(eps > 0.0, ErrorCode::domain, "BG needs a shift eps > 0");
  const VectorXcd r = shifted_points(grid, eps);
  VectorXcd v(r.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    const cplx r2 = r(k) * r(k);
    v(k) = 0.5 * ((j * j - 1.0) / (4.0 * r2) + r2) - lambda * lambda * r2 * r2;
  }
  return with_potential(kinetic(grid), v, grid, 0.5);
}

OperatorMatrix build_bg_avatar(double lambda, double j, const GridSpec& grid) {
  require(finite(lambda) && lambda >= 0.0, ErrorCode::domain, "BG avatar needs lambda >= 0");
  require(finite(j) && j >= 1.0, ErrorCode::domain, "BG avatar needs j >= 1");
  const VectorXd x = grid.points();
  VectorXcd v(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double y = x(k);
    const double y2 = y * y;
    v(k) = j / 2.0 - j * lambda * y + y2 - 2.0 * lambda * y2 * y + lambda * lambda * y2 * y2;
  }
  return with_potential(kinetic(grid), v, grid);
}

OperatorMatrix build_njm_mapped(double g_value, const GridSpec& grid) {
  require(finite(g_value) && g_value > 0.0, ErrorCode::domain, "NJM needs g > 0");
  return jm_mapped(g_value, grid);
}

OperatorMatrix build_njm_avatar(double g_value, const GridSpec& grid) {
  require(finite(g_value) && g_value > 0.0, ErrorCode::domain, "NJM avatar needs g > 0");
  const double root = std::sqrt(g_value);
  const VectorXd x = grid.points();
  VectorXcd v(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double x2 = x(k) * x(k);
    v(k) = -2.0 * root * x(k) + 4.0 * g_value * x2 * x2;
  }
  return with_potential(kinetic(grid), v, grid);
}

OperatorMatrix build_njm_textbook(double g_value, const GridSpec& grid) {
  require(finite(g_value) && g_value > 0.0, ErrorCode::domain, "NJM needs g > 0");
  const VectorXd k = grid.wavenumbers();
  VectorXcd symbol(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    const double k2 = k(m) * k(m);
    symbol(m) = k2 * k2 / (64.0 * g_value) - 0.5 * k(m);
  }
  MatrixXcd h = fourier_multiplier(grid, symbol);
  const VectorXd x = grid.points();
  for (Eigen::Index j = 0; j < x.size(); ++j) h(j, j) += 16.0 * g_value * x(j) * x(j);
  h = 0.5 * (h + h.adjoint()).eval();
  return OperatorMatrix(std::move(h), Basis::position_grid, grid);
}

WellAnalysis analyze_well(double lambda) {
  require(finite(lambda) && lambda > 0.0, ErrorCode::domain, "well analysis needs lambda > 0");
  WellAnalysis w{};
  const double cube_root = std::cbrt(lambda);
  w.y_min = 1.0 / (2.0 * cube_root);
  w.v_min = -0.75 * cube_root * cube_root;
  w.omega_sq = 24.0 * lambda * lambda * w.y_min * w.y_min;
  w.e0_estimate = w.v_min + std::sqrt(6.0) * cube_root * cube_root;
  return w;
}

Eigen::MatrixXcd grid_parity(const GridSpec& grid) {
  const int n = grid.n_points();
  MatrixXcd pi = MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) pi((n - k) % n, k) = 1.0;
  return pi;
}

double tp_symmetry_residual(const OperatorMatrix& m) {
  const Eigen::Index n = m.dim();
  const MatrixXcd pi = grid_parity(m.grid);
  const MatrixXcd mirrored = pi * m.entries.conjugate() * pi;
  const MatrixXcd diff = (mirrored - m.entries).bottomRightCorner(n - 1, n - 1);
  const double scale = m.entries.bottomRightCorner(n - 1, n - 1).stableNorm();
  return scale == 0.0 ? 0.0 : diff.stableNorm() / scale;
}

}  // namespace niplab
