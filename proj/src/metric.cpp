#include "niplab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "niplab/errors.hpp"
#include "niplab/linalg.hpp"

namespace niplab {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error(ErrorCode::invalid_configuration, "operators live on different grids");
}

/// exp(c3 k^3 + c1 k) for |k| <= cutoff, zero elsewhere.
VectorXcd exponential_symbol(const GridSpec& grid, double c3, double c1, double cutoff) {
  const VectorXd k = grid.wavenumbers();
  VectorXcd s(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    s(m) = std::abs(k(m)) <= cutoff ? std::exp(c3 * k(m) * k(m) * k(m) + c1 * k(m)) : 0.0;
  }
  return s;
}

double symbol_range(const VectorXcd& s) {
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < s.size(); ++m) {
    const double a = std::abs(s(m));
    if (a == 0.0) continue;
    hi = std::max(hi, a);
    lo = std::min(lo, a);
  }
  return hi == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
}

DysonMap dyson_from_symbol(const GridSpec& grid, VectorXcd omega, double cutoff) {
  DysonMap d{.matrix = OperatorMatrix(fourier_multiplier(grid, omega), Basis::position_grid, grid),
             .metric_consistency = 0.0,
             .condition_number = symbol_range(omega),
             .cutoff_pmax = cutoff,
             .symbol = omega};
  const VectorXcd theta = omega.cwiseAbs2().cast<cplx>();
  const MatrixXcd theta_dense = fourier_multiplier(grid, theta);
  d.metric_consistency = relative_difference(d.matrix.entries.adjoint() * d.matrix.entries, theta_dense);
  return d;
}

MatrixXcd apply_to_probe(const MetricOperator& theta, const ProbeSubspace& probe) {
  if (theta.symbol) return apply_symbol(theta.matrix.grid, *theta.symbol, probe);
  return theta.matrix.entries * probe.position;
}

}  // namespace

double admissible_cutoff(const GridSpec& grid, double c3, double c1, double guard) {
  VectorXd k = grid.wavenumbers();
  std::vector<double> mags(k.data(), k.data() + k.size());
  std::sort(mags.begin(), mags.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  double cutoff = 0.0;
  for (double kk : mags) {
    const double e = c3 * kk * kk * kk + c1 * kk;
    if (!(std::abs(e) < guard)) break;
    cutoff = std::abs(kk);
  }
  if (cutoff == 0.0) {
    throw Error(ErrorCode::invalid_configuration,
                "exponent overflows already at the first grid momentum " + std::to_string(grid.wavenumbers()(1)) +
                    "; use a coarser grid or a larger box (smaller p_max)");
  }
  return cutoff;
}

MetricOperator metric_from_symbol(const GridSpec& grid, const VectorXcd& symbol) {
  if (!symbol.allFinite()) throw Error(ErrorCode::not_a_metric, "metric symbol is not finite");
  bool positive = true;
  double cutoff = 0.0;
  const VectorXd k = grid.wavenumbers();
  for (Eigen::Index m = 0; m < symbol.size(); ++m) {
    if (symbol(m) == cplx(0.0)) continue;
    cutoff = std::max(cutoff, std::abs(k(m)));
    if (!(symbol(m).real() > 0.0) || std::abs(symbol(m).imag()) > 1e-14 * symbol(m).real()) positive = false;
  }
  return {OperatorMatrix(fourier_multiplier(grid, symbol), Basis::position_grid, grid), positive, cutoff, symbol};
}

MetricOperator metric_from_matrix(const OperatorMatrix& theta) {
  if (!theta.entries.allFinite()) throw Error(ErrorCode::not_a_metric, "metric matrix is not finite");
  if (hermiticity_residual(theta.entries) > 1e-12) {
    throw Error(ErrorCode::not_a_metric, "metric matrix is not Hermitian");
  }
  const auto dec = linalg::eig_hermitian(theta.entries, false);
  const bool positive = dec.values.size() > 0 && dec.values(0).real() > 0.0;
  return {theta, positive, theta.grid.momentum_cutoff(), std::nullopt};
}

MetricOperator build_jm_metric(double lambda, const GridSpec& grid) {
  if (!(std::isfinite(lambda) && lambda > 0.0)) throw Error(ErrorCode::domain, "JM metric needs lambda > 0");
  const double g = lambda * lambda;
  const double cutoff = admissible_cutoff(grid, 1.0 / (48.0 * g), -2.0);
  return metric_from_symbol(grid, exponential_symbol(grid, 1.0 / (48.0 * g), -2.0, cutoff));
}

DysonMap build_njm_dyson(double g_value, const GridSpec& grid) {
  if (!(std::isfinite(g_value) && g_value > 0.0)) throw Error(ErrorCode::domain, "NJM Dyson map needs g > 0");
  // The cutoff is that of the metric exp(2 * exponent), so both share one
  // admissible subspace.
  const double cutoff = admissible_cutoff(grid, 1.0 / (48.0 * g_value), -2.0);
  return dyson_from_symbol(grid, exponential_symbol(grid, 1.0 / (96.0 * g_value), -1.0, cutoff), cutoff);
}

double quasi_hermiticity_residual(const OperatorMatrix& q, const MetricOperator& theta,
                                  const ProbeSubspace& probe) {
  require_same_grid(q.grid, theta.matrix.grid);
  const MatrixXcd qv = q.entries * probe.position;
  const MatrixXcd tv = apply_to_probe(theta, probe);
  // V^dagger (Q^dagger Theta - Theta Q) V with Theta Hermitian.
  const MatrixXcd c = qv.adjoint() * tv - tv.adjoint() * qv;
  const double scale = qv.norm() * tv.norm();
  return scale == 0.0 ? 0.0 : c.norm() / scale;
}

double quasi_hermiticity_residual(const OperatorMatrix& q, const MetricOperator& theta) {
  return quasi_hermiticity_residual(q, theta, hermite_probe(q.grid));
}

double quasi_hermiticity_residual_full(const OperatorMatrix& q, const MetricOperator& theta) {
  require_same_grid(q.grid, theta.matrix.grid);
  const MatrixXcd& t = theta.matrix.entries;
  const MatrixXcd r = q.entries.adjoint() * t - t * q.entries;
  const double scale = q.entries.norm() * t.norm();
  return scale == 0.0 ? 0.0 : r.norm() / scale;
}

DysonMap factor_metric(const MetricOperator& theta) {
  const GridSpec& grid = theta.matrix.grid;
  if (theta.symbol) {
    const VectorXcd& s = *theta.symbol;
    VectorXcd root(s.size());
    for (Eigen::Index m = 0; m < s.size(); ++m) {
      if (s(m) == cplx(0.0)) {
        root(m) = 0.0;  // dropped mode
        continue;
      }
      if (!(s(m).real() > 0.0) || std::abs(s(m).imag()) > 1e-12 * std::abs(s(m))) {
        throw Error(ErrorCode::not_a_metric, "metric symbol has a non-positive entry");
      }
      root(m) = std::sqrt(s(m).real());
    }
    return dyson_from_symbol(grid, root, theta.cutoff_pmax);
  }
  const auto dec = linalg::eig_hermitian(theta.matrix.entries, true);
  const VectorXd values = dec.values.real();
  if (!(values.minCoeff() > 0.0)) {
    throw Error(ErrorCode::not_a_metric,
                "metric has a non-positive eigenvalue " + std::to_string(values.minCoeff()));
  }
  const VectorXd roots = values.cwiseSqrt();
  MatrixXcd omega = dec.vectors * roots.cast<cplx>().asDiagonal() * dec.vectors.adjoint();
  omega = 0.5 * (omega + omega.adjoint()).eval();
  DysonMap d{.matrix = OperatorMatrix(std::move(omega), theta.matrix.basis, grid),
             .metric_consistency = 0.0,
             .condition_number = roots.maxCoeff() / roots.minCoeff(),
             .cutoff_pmax = theta.cutoff_pmax,
             .symbol = std::nullopt};
  d.metric_consistency = relative_difference(d.matrix.entries.adjoint() * d.matrix.entries, theta.matrix.entries);
  return d;
}

Hermitized hermitize(const OperatorMatrix& h, const DysonMap& omega) {
  require_same_grid(h.grid, omega.matrix.grid);
  const GridSpec& grid = h.grid;
  const ProbeSubspace probe = hermite_probe(grid);

  if (!omega.symbol) {
    if (!(omega.condition_number <= conditioning_limit)) {
      throw Error(ErrorCode::conditioning,
                  "Dyson map condition number " + std::to_string(omega.condition_number) +
                      " exceeds 1e12; lower the momentum cutoff");
    }
    const Eigen::PartialPivLU<MatrixXcd> lu(omega.matrix.entries);
    const MatrixXcd inv = lu.inverse();
    MatrixXcd hh = omega.matrix.entries * h.entries * inv;
    const MatrixXcd c = probe.position.adjoint() * hh * probe.position;
    const double res = c.norm() == 0.0 ? 0.0 : (c - c.adjoint()).norm() / c.norm();
    const double mres = hermiticity_residual(hh);
    std::vector<int> modes(static_cast<std::size_t>(h.dim()));
    std::iota(modes.begin(), modes.end(), 0);
    return {OperatorMatrix(std::move(hh), h.basis, grid), std::move(modes), res, mres, omega.condition_number,
            omega.cutoff_pmax};
  }

  // Keep the widest symmetric band |k| <= K whose dynamic range stays below
  // the conditioning limit.
  const VectorXcd& w = *omega.symbol;
  const VectorXd k = grid.wavenumbers();
  std::vector<int> order(static_cast<std::size_t>(k.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(k(a)) < std::abs(k(b)); });
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double cutoff = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    // Admit all modes sharing the same |k| together.
    std::size_t j = i;
    double hi2 = hi;
    double lo2 = lo;
    bool ok = true;
    while (j < order.size() && std::abs(k(order[j])) == std::abs(k(order[i]))) {
      const double a = std::abs(w(order[j]));
      if (a == 0.0) ok = false;
      hi2 = std::max(hi2, a);
      lo2 = std::min(lo2, a);
      ++j;
    }
    if (!ok || hi2 / lo2 > conditioning_limit) break;
    hi = hi2;
    lo = lo2;
    cutoff = std::abs(k(order[i]));
    i = j;
  }
  std::vector<int> modes;
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    if (std::abs(k(m)) <= cutoff && w(m) != cplx(0.0)) modes.push_back(static_cast<int>(m));
  }
  if (modes.size() < 2) {
    throw Error(ErrorCode::conditioning, "Dyson map is ill-conditioned on every momentum band");
  }
  const auto nm = static_cast<Eigen::Index>(modes.size());
  const MatrixXcd f = dft_matrix(grid);
  const MatrixXcd hk = f * h.entries * f.adjoint();
  MatrixXcd block(nm, nm);
  for (Eigen::Index a = 0; a < nm; ++a) {
    for (Eigen::Index b = 0; b < nm; ++b) block(a, b) = w(modes[a]) * hk(modes[a], modes[b]) / w(modes[b]);
  }

  VectorXcd inv_band = VectorXcd::Zero(k.size());
  VectorXcd band = VectorXcd::Zero(k.size());
  for (int m : modes) {
    inv_band(m) = 1.0 / w(m);
    band(m) = w(m);
  }
  const MatrixXcd hv = h.entries * apply_symbol(grid, inv_band, probe);
  const MatrixXcd image = from_momentum(grid, band.asDiagonal() * to_momentum(grid, hv));
  const MatrixXcd c = probe.position.adjoint() * image;
  const double res = c.norm() == 0.0 ? 0.0 : (c - c.adjoint()).norm() / c.norm();
  const double mres = hermiticity_residual(block);
  return {OperatorMatrix(std::move(block), Basis::momentum_grid, grid), std::move(modes), res, mres, hi / lo, cutoff};
}

Eigen::VectorXcd map_state(const VectorXcd& v, const DysonMap& omega, MapDirection direction) {
  const GridSpec& grid = omega.matrix.grid;
  if (v.size() != omega.matrix.dim()) throw Error(ErrorCode::invalid_configuration, "state dimension mismatch");
  if (omega.symbol) {
    const VectorXcd s = direction == MapDirection::to_textbook ? *omega.symbol
                                                               : omega.symbol->cwiseAbs2().cast<cplx>().eval();
    return from_momentum(grid, s.asDiagonal() * to_momentum(grid, v));
  }
  const MatrixXcd& o = omega.matrix.entries;
  if (direction == MapDirection::to_textbook) return o * v;
  return o.adjoint() * (o * v);
}

}  // namespace niplab
