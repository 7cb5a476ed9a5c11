#include "niplab/fring_tenney.hpp"

#include <cmath>
#include <string>

#include "niplab/errors.hpp"
#include "niplab/fourier.hpp"
#include "niplab/linalg.hpp"
#include "niplab/metric.hpp"
#include "niplab/nip.hpp"

namespace niplab {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr cplx I{0.0, 1.0};

struct Coefficients {
  double a, b, g, d;
};

Coefficients at(const FTParams& p, double t) {
  return {p.alpha.value(t), p.beta.value(t), p.gamma.value(t), p.delta.value(t)};
}

void guard(const Coefficients& c, const GridSpec& grid) {
  const double x_max = grid.half_width();
  const double p_max = grid.momentum_cutoff();
  if (!(std::abs(c.a) * x_max < exponent_guard)) {
    throw Error(ErrorCode::invalid_configuration,
                "alpha X exponent reaches " + std::to_string(std::abs(c.a) * x_max) + "; use L < " +
                    std::to_string(exponent_guard / std::abs(c.a)));
  }
  if (!(std::abs(c.b) * p_max * p_max * p_max < exponent_guard)) {
    throw Error(ErrorCode::invalid_configuration,
                "beta P^3 exponent reaches " + std::to_string(std::abs(c.b) * std::pow(p_max, 3)) +
                    "; use p_max < " + std::to_string(std::cbrt(exponent_guard / std::abs(c.b))));
  }
}

VectorXcd momentum_exponent(const Coefficients& c, const GridSpec& grid, double sign) {
  const VectorXd k = grid.wavenumbers();
  VectorXcd s(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    const double km = k(m);
    s(m) = std::exp(sign * (c.b * km * km * km + I * (c.g * km * km + c.d * km)));
  }
  return s;
}

MatrixXcd position_factor(double a, const GridSpec& grid) {
  const VectorXd x = grid.points();
  const MatrixXcd ax = (a * x).cast<cplx>().asDiagonal();
  return linalg::expm(ax);
}

// i Omega(t)^-1 (Omega(t+h) - Omega(t-h)) V / (2h) with Omega = e^{aX} e^{E(P)}.
// Writing A = F^-1 e^{E(t+-h)} V^ gives
//   Omega^-1 Omega(t+-h) V = F^-1 e^{-E} F [expm1(da X) A] + F^-1 e^{E(t+-h)-E} V^,
// and the two shifted terms are differenced through expm1 so that nothing
// of size one cancels.
MatrixXcd coriolis_difference(const FTParams& p, double t, double h, const GridSpec& grid,
                              const ProbeSubspace& probe) {
  const Coefficients c0 = at(p, t);
  const Coefficients cp = at(p, t + h);
  const Coefficients cm = at(p, t - h);
  guard(cp, grid);
  guard(cm, grid);
  const VectorXd k = grid.wavenumbers();
  const VectorXd x = grid.points();
  const auto shift = [&](const Coefficients& c, Eigen::Index m) {
    const double km = k(m);
    return cplx{(c.b - c0.b) * km * km * km, (c.g - c0.g) * km * km + (c.d - c0.d) * km};
  };
  VectorXcd e0(k.size());
  VectorXcd tail(k.size());
  VectorXcd up(k.size());
  VectorXcd down(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    const double km = k(m);
    e0(m) = cplx{c0.b * km * km * km, c0.g * km * km + c0.d * km};
    const cplx ep = shift(cp, m);
    const cplx em = shift(cm, m);
    tail(m) = complex_expm1(ep) - complex_expm1(em);
    up(m) = std::exp(e0(m) + ep);
    down(m) = std::exp(e0(m) + em);
  }
  const MatrixXcd a_up = from_momentum(grid, up.asDiagonal() * probe.momentum);
  const MatrixXcd a_down = from_momentum(grid, down.asDiagonal() * probe.momentum);
  MatrixXcd mixed(a_up.rows(), a_up.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double du = std::expm1((cp.a - c0.a) * x(j));
    const double dd = std::expm1((cm.a - c0.a) * x(j));
    mixed.row(j) = du * a_up.row(j) - dd * a_down.row(j);
  }
  const VectorXcd undo = (-e0.array()).exp().matrix();
  const MatrixXcd diff =
      from_momentum(grid, undo.asDiagonal() * to_momentum(grid, mixed) + tail.asDiagonal() * probe.momentum);
  return (I / (2.0 * h)) * diff;
}

}  // namespace

OperatorMatrix build_ft_dyson(const FTParams& p, double t, const GridSpec& grid) {
  const Coefficients c = at(p, t);
  guard(c, grid);
  MatrixXcd m = position_factor(c.a, grid) * fourier_multiplier(grid, momentum_exponent(c, grid, 1.0));
  return OperatorMatrix(std::move(m), Basis::position_grid, grid);
}

OperatorMatrix build_ft_dyson_inverse(const FTParams& p, double t, const GridSpec& grid) {
  const Coefficients c = at(p, t);
  guard(c, grid);
  MatrixXcd m = fourier_multiplier(grid, momentum_exponent(c, grid, -1.0)) * position_factor(-c.a, grid);
  return OperatorMatrix(std::move(m), Basis::position_grid, grid);
}

OperatorMatrix ft_coriolis_analytic(const FTParams& p, double t, const GridSpec& grid) {
  const Coefficients c = at(p, t);
  const double ad = p.alpha.derivative(t);
  const double bd = p.beta.derivative(t);
  const double gd = p.gamma.derivative(t);
  const double dd = p.delta.derivative(t);
  const VectorXd k = grid.wavenumbers();
  VectorXcd symbol(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    const double km = k(m);
    symbol(m) = I * bd * km * km * km - (3.0 * ad * c.b + gd) * km * km - (2.0 * I * c.g * ad + dd) * km -
                I * c.d * ad;
  }
  MatrixXcd s = fourier_multiplier(grid, symbol);
  s.diagonal() += (I * ad) * grid.points().cast<cplx>();
  return OperatorMatrix(std::move(s), Basis::position_grid, grid);
}

OperatorMatrix ft_generator(double m_value, double lambda_sq, const GridSpec& grid) {
  if (!(std::isfinite(lambda_sq) && lambda_sq > 0.0)) throw Error(ErrorCode::domain, "generator needs lambda^2 > 0");
  if (!std::isfinite(m_value)) throw Error(ErrorCode::domain, "generator needs a finite mass");
  const VectorXd k = grid.wavenumbers();
  const MatrixXcd p = fourier_multiplier(grid, k.cast<cplx>());
  const MatrixXcd p2 = fourier_multiplier(grid, k.array().square().matrix().cast<cplx>());
  const VectorXd x = grid.points();
  const MatrixXcd xp2 = x.cast<cplx>().asDiagonal() * p2;
  const MatrixXcd p2x = p2 * x.cast<cplx>().asDiagonal();
  MatrixXcd g = p2 - 0.5 * p;
  g += 0.5 * I * (xp2 + p2x);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double xj = x(j);
    const cplx z2 = -4.0 - 4.0 * I * xj;
    const cplx z4 = 16.0 * (1.0 + 2.0 * I * xj - xj * xj);
    g(j, j) += (m_value / 4.0) * z2 - (lambda_sq / 16.0) * z4;
  }
  return OperatorMatrix(std::move(g), Basis::position_grid, grid);
}

FTConstraintOutput ft_constraints(const Schedule& sigma, double c2, double t) {
  const double s = sigma.value(t);
  if (!(s > 0.0)) throw Error(ErrorCode::domain, "sigma(" + std::to_string(t) + ") must be positive");
  const double sd = sigma.derivative(t);
  const double sdd = sigma.second_derivative(t);
  return {1.0 / (4.0 * s * s * s), (4.0 * c2 + sd * sd - 2.0 * s * sdd) / (4.0 * s * s)};
}

MasslessCheck ft_massless_c2(const std::array<double, 3>& kappas) {
  const auto [k0, k1, k2] = kappas;
  MasslessCheck out{k0 * k2 - 0.25 * k1 * k1, 0.0, 0};
  const Schedule sigma = Schedule::polynomial({k0, k1, k2});
  constexpr int samples = 100;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    if (!(sigma.value(t) > 0.0)) continue;
    out.max_mass = std::max(out.max_mass, std::abs(ft_constraints(sigma, out.c2, t).mass));
    ++out.samples;
  }
  return out;
}

FTHamiltonian ft_hamiltonian(const FTParams& p, double m_value, double lambda_sq, double t, const GridSpec& grid) {
  OperatorMatrix g = ft_generator(m_value, lambda_sq, grid);
  OperatorMatrix s = ft_coriolis_analytic(p, t, grid);
  OperatorMatrix h = g + s;
  const OperatorMatrix omega = build_ft_dyson(p, t, grid);
  const MetricOperator theta{OperatorMatrix(omega.entries.adjoint() * omega.entries, Basis::position_grid, grid),
                             true, grid.momentum_cutoff(), std::nullopt};
  const double qh = quasi_hermiticity_residual(h, theta);
  return {std::move(h), std::move(g), std::move(s), qh};
}

CoriolisConvergence ft_validate_coriolis(const FTParams& p, double t, double h, const GridSpec& grid) {
  const OperatorMatrix sigma = ft_coriolis_analytic(p, t, grid);
  const ProbeSubspace probe = hermite_probe(grid, 6, 0.9);
  const MatrixXcd exact = sigma.entries * probe.position;
  const double scale = exact.norm();
  const auto residual = [&](double step) {
    const MatrixXcd fd = coriolis_difference(p, t, step, grid, probe);
    return scale == 0.0 ? (exact - fd).norm() : (exact - fd).norm() / scale;
  };
  CoriolisConvergence out{h, 0.0, 0.0, 0.0};
  out.residual_h = residual(h);
  out.residual_half = residual(0.5 * h);
  out.ratio = out.residual_half > 0.0 ? out.residual_h / out.residual_half : 0.0;
  return out;
}

}  // namespace niplab
