#include "niplab/nip.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "niplab/errors.hpp"
#include "niplab/fourier.hpp"
#include "niplab/linalg.hpp"
#include "niplab/operators.hpp"

namespace niplab {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr cplx I{0.0, 1.0};

VectorXcd power_symbol(const GridSpec& grid, int power, double scale) {
  const VectorXd k = grid.wavenumbers();
  VectorXcd s(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) s(m) = scale * std::pow(k(m), power);
  return s;
}

}  // namespace

cplx complex_expm1(cplx z) {
  const double a = std::expm1(z.real());
  const double half = std::sin(0.5 * z.imag());
  return {a * std::cos(z.imag()) - 2.0 * half * half, (a + 1.0) * std::sin(z.imag())};
}

namespace {

MatrixXcd central_difference(const OperatorFamily& f, double t, double h) {
  return (f(t + h).entries - f(t - h).entries) / (2.0 * h);
}

// Relative to the larger side or to the size of the products that make up the
// right-hand side, so that an exact cancellation reads as roundoff, not as 1.
double residual_between(const MatrixXcd& lhs, const MatrixXcd& rhs, double terms = 0.0) {
  const double scale = std::max({lhs.norm(), rhs.norm(), terms});
  return scale == 0.0 ? 0.0 : (lhs - rhs).norm() / scale;
}

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::invalid_configuration, "step must be positive");
}

}  // namespace

cplx pairing(const EvolutionState& s) { return s.ketket.dot(s.ket); }

OperatorMatrix coriolis_njm(const Schedule& g, double t, const GridSpec& grid) {
  const double gv = g.value(t);
  if (!(gv > 0.0)) throw Error(ErrorCode::domain, "coupling g(t) must stay positive");
  const double rate = g.derivative(t);
  return OperatorMatrix(fourier_multiplier(grid, power_symbol(grid, 3, 1.0) * (-I * rate / (96.0 * gv * gv))),
                        Basis::position_grid, grid);
}

OperatorMatrix generator_G(const OperatorMatrix& h, const OperatorMatrix& sigma) { return h - sigma; }

NjmFamily::NjmFamily(Schedule g, GridSpec grid) : g_(std::move(g)), grid_(grid) {
  if (!g_.positive_on_domain()) {
    throw Error(ErrorCode::domain, "g(t) = " + g_.describe() + " is not positive on [" + std::to_string(g_.t0()) +
                                       ", " + std::to_string(g_.t1()) + "]");
  }
}

double NjmFamily::coupling(double t) const {
  const double gv = g_.value(t);
  if (!(gv > 0.0)) throw Error(ErrorCode::domain, "g(" + std::to_string(t) + ") is not positive");
  return gv;
}

VectorXcd NjmFamily::dyson_symbol(double t) const {
  const DysonMap d = dyson(t);
  return *d.symbol;
}

VectorXcd NjmFamily::dyson_exponent(double t) const {
  const double gv = coupling(t);
  const VectorXd k = grid_.wavenumbers();
  return (k.array().cube() / (96.0 * gv) - k.array()).matrix().cast<cplx>();
}

DysonMap NjmFamily::dyson(double t) const { return build_njm_dyson(coupling(t), grid_); }

MetricOperator NjmFamily::metric(double t) const {
  return metric_from_symbol(grid_, dyson(t).symbol->cwiseAbs2().cast<cplx>());
}

OperatorMatrix NjmFamily::coriolis(double t) const { return coriolis_njm(g_, t, grid_); }

OperatorMatrix NjmFamily::textbook(double t) const { return build_njm_textbook(coupling(t), grid_); }

OperatorMatrix NjmFamily::textbook_rate(double t) const {
  const double gv = coupling(t);
  const double rate = g_.derivative(t);
  MatrixXcd m = fourier_multiplier(grid_, power_symbol(grid_, 4, -rate / (64.0 * gv * gv)));
  const VectorXd x = grid_.points();
  m.diagonal() += (16.0 * rate * x.array().square()).matrix().cast<cplx>();
  m = 0.5 * (m + m.adjoint()).eval();
  return OperatorMatrix(std::move(m), Basis::position_grid, grid_);
}

OperatorMatrix NjmFamily::pull_back(const OperatorMatrix& q, double t) const {
  const DysonMap d = dyson(t);
  const VectorXcd& w = *d.symbol;
  if ((w.array() == cplx(0.0)).any() || d.condition_number > conditioning_limit) {
    throw Error(ErrorCode::conditioning,
                "Dyson map is not invertible to working precision on this grid (condition " +
                    std::to_string(d.condition_number) + "); use fewer points or a larger box");
  }
  const MatrixXcd f = dft_matrix(grid_);
  MatrixXcd a = f * q.entries * f.adjoint();
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    for (Eigen::Index m = 0; m < a.rows(); ++m) a(m, n) *= w(n) / w(m);
  }
  return OperatorMatrix(f.adjoint() * a * f, Basis::position_grid, grid_);
}

OperatorMatrix NjmFamily::hamiltonian(double t) const { return pull_back(textbook(t), t); }

OperatorMatrix NjmFamily::generator(double t) const { return generator_G(hamiltonian(t), coriolis(t)); }

OperatorMatrix NjmFamily::hamiltonian_source(double t) const { return pull_back(I * textbook_rate(t), t); }

EvolutionState NjmFamily::initial_state(double t0, double center, double width) const {
  if (!(width > 0.0)) throw Error(ErrorCode::invalid_configuration, "initial width must be positive");
  const VectorXd k = grid_.wavenumbers();
  VectorXcd psi_hat(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    const double s = k(m) * width;
    psi_hat(m) = std::exp(-0.5 * s * s) * std::polar(1.0, -k(m) * center);
  }
  const VectorXcd theta = dyson(t0).symbol->cwiseAbs2().cast<cplx>();
  EvolutionState s;
  s.t = t0;
  s.ket = from_momentum(grid_, psi_hat);
  s.ketket = from_momentum(grid_, theta.asDiagonal() * psi_hat);
  const double norm = std::sqrt(std::abs(pairing(s)));
  s.ket /= norm;
  s.ketket /= norm;
  return s;
}

EvolutionTrace evolve_pair(const OperatorFamily& g_of_t, const EvolutionState& s0, double t1, double dt,
                           const EvolutionOptions& options) {
  require_step(dt);
  if (!(t1 > s0.t)) throw Error(ErrorCode::invalid_configuration, "t1 must exceed the initial time");
  if (s0.ket.size() != s0.ketket.size()) throw Error(ErrorCode::invalid_configuration, "ket and ketket sizes differ");
  const long steps = std::max(1L, std::lround((t1 - s0.t) / dt));
  const double h = (t1 - s0.t) / static_cast<double>(steps);

  EvolutionTrace trace;
  trace.step = h;
  for (const auto& obs : options.observables) trace.observables.emplace_back(obs.first, std::vector<cplx>{});

  EvolutionState s = s0;
  const cplx n0 = pairing(s);
  if (std::abs(n0) == 0.0) throw Error(ErrorCode::degenerate_state, "initial pairing vanishes");

  auto record = [&](const EvolutionState& st) {
    trace.times.push_back(st.t);
    trace.norms.push_back(pairing(st));
    for (std::size_t i = 0; i < options.observables.size(); ++i) {
      trace.observables[i].second.push_back(expectation(st, options.observables[i].second(st.t)));
    }
  };
  record(s);

  OperatorMatrix ga = g_of_t(s.t);
  for (long step = 1; step <= steps; ++step) {
    const double t = s.t;
    const OperatorMatrix gb = g_of_t(t + 0.5 * h);
    const OperatorMatrix gc = g_of_t(step == steps ? t1 : t + h);
    auto rk4 = [h](const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c, const VectorXcd& v) {
      const VectorXcd k1 = -I * (a * v);
      const VectorXcd k2 = -I * (b * (v + 0.5 * h * k1));
      const VectorXcd k3 = -I * (b * (v + 0.5 * h * k2));
      const VectorXcd k4 = -I * (c * (v + h * k3));
      return VectorXcd(v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };
    EvolutionState next;
    next.t = step == steps ? t1 : s0.t + static_cast<double>(step) * h;
    next.ket = rk4(ga.entries, gb.entries, gc.entries, s.ket);
    next.ketket = rk4(ga.entries.adjoint(), gb.entries.adjoint(), gc.entries.adjoint(), s.ketket);
    const cplx nn = pairing(next);
    const double drift = std::abs(nn - n0) / std::abs(n0);
    if (!std::isfinite(drift) || drift > options.abort_threshold) {
      throw InstabilityError("pairing drift " + std::to_string(drift) + " at step " + std::to_string(step) +
                                 " exceeds the abort threshold",
                             static_cast<int>(step), s.t);
    }
    trace.drift = std::max(trace.drift, drift);
    s = std::move(next);
    record(s);
    ga = gc;
  }
  trace.final_state = s;
  return trace;
}

cplx expectation(const EvolutionState& s, const OperatorMatrix& q) {
  if (q.dim() != s.ket.size()) throw Error(ErrorCode::invalid_configuration, "observable dimension mismatch");
  const cplx norm = pairing(s);
  const double scale = s.ket.norm() * s.ketket.norm();
  if (!(std::abs(norm) > 1e-14 * scale)) throw Error(ErrorCode::degenerate_state, "pairing <<psi|psi> vanishes");
  return s.ketket.dot(q.entries * s.ket) / norm;
}

OperatorMatrix projector(const EvolutionState& s, const GridSpec& grid) {
  const cplx norm = pairing(s);
  const double scale = s.ket.norm() * s.ketket.norm();
  if (!(std::abs(norm) > 1e-14 * scale)) throw Error(ErrorCode::degenerate_state, "pairing <<psi|psi> vanishes");
  return OperatorMatrix(s.ket * s.ketket.adjoint() / norm, Basis::position_grid, grid);
}

MetricEvolutionResiduals metric_evolution_residuals(const OperatorFamily& theta, const OperatorFamily& sigma,
                                                    const OperatorFamily& g, double t, double h) {
  require_step(h);
  const MatrixXcd lhs = I * central_difference(theta, t, h);
  const MatrixXcd th = theta(t).entries;
  const MatrixXcd s = sigma(t).entries;
  const MatrixXcd gg = g(t).entries;
  const MatrixXcd rhs21 = th * s - s.adjoint() * th;
  const MatrixXcd rhs22 = gg.adjoint() * th - th * gg;
  const double t21 = (th * s).norm();
  const double t22 = (th * gg).norm();
  return {residual_between(lhs, rhs21, t21), residual_between(lhs, rhs22, t22),
          residual_between(rhs21, rhs22, std::max(t21, t22))};
}

double heisenberg_residual(const OperatorFamily& q, const OperatorFamily& sigma, const OperatorFamily& k, double t,
                           double h) {
  require_step(h);
  const MatrixXcd lhs = I * central_difference(q, t, h);
  const MatrixXcd qq = q(t).entries;
  const MatrixXcd s = sigma(t).entries;
  MatrixXcd rhs = qq * s - s * qq;
  const double terms = (qq * s).norm();
  if (k) rhs += k(t).entries;
  return residual_between(lhs, rhs, terms);
}

HamiltonianForms heisenberg_hamiltonian_forms(const OperatorFamily& h, const OperatorFamily& sigma,
                                              const OperatorFamily& g, const OperatorFamily& k, double t,
                                              double h_step) {
  require_step(h_step);
  const MatrixXcd lhs = I * central_difference(h, t, h_step);
  const MatrixXcd hh = h(t).entries;
  const MatrixXcd s = sigma(t).entries;
  const MatrixXcd gg = g(t).entries;
  MatrixXcd rhs25 = hh * s - s * hh;
  MatrixXcd rhs26 = gg * hh - hh * gg;
  const double t25 = (hh * s).norm();
  const double t26 = (gg * hh).norm();
  if (k) {
    const MatrixXcd kk = k(t).entries;
    rhs25 += kk;
    rhs26 += kk;
  }
  return {residual_between(lhs, rhs25, t25), residual_between(lhs, rhs26, t26),
          residual_between(rhs25, rhs26, std::max(t25, t26))};
}

double coriolis_fd_residual(const OperatorFamily& omega, const OperatorFamily& omega_inverse,
                            const OperatorMatrix& sigma, double t, double h, const MatrixXcd& columns) {
  require_step(h);
  const MatrixXcd diff = (omega(t + h).entries - omega(t - h).entries) * columns / (2.0 * h);
  const MatrixXcd fd = I * (omega_inverse(t).entries * diff);
  const MatrixXcd exact = sigma.entries * columns;
  const double scale = exact.norm();
  return scale == 0.0 ? (exact - fd).norm() : (exact - fd).norm() / scale;
}

double coriolis_fd_residual_diagonal(const std::function<VectorXcd(double)>& exponent, const OperatorMatrix& sigma,
                                     double t, double h, const ProbeSubspace& probe) {
  require_step(h);
  const VectorXcd e0 = exponent(t);
  const VectorXcd ep = exponent(t + h) - e0;
  const VectorXcd em = exponent(t - h) - e0;
  VectorXcd quotient(e0.size());
  for (Eigen::Index m = 0; m < e0.size(); ++m) quotient(m) = I * (complex_expm1(ep(m)) - complex_expm1(em(m))) / (2.0 * h);
  const MatrixXcd fd = apply_symbol(sigma.grid, quotient, probe);
  const MatrixXcd exact = sigma.entries * probe.position;
  const double scale = exact.norm();
  return scale == 0.0 ? (exact - fd).norm() : (exact - fd).norm() / scale;
}

DysonMap reconstruct_dyson(const OperatorFamily& sigma, const DysonMap& omega0, double t0, double t1, double dt) {
  require_step(dt);
  if (!(t1 > t0)) throw Error(ErrorCode::invalid_configuration, "t1 must exceed t0");
  const long steps = std::max(1L, std::lround((t1 - t0) / dt));
  const double h = (t1 - t0) / static_cast<double>(steps);
  MatrixXcd w = omega0.matrix.entries;
  const double start_norm = w.norm();
  auto rhs = [](const MatrixXcd& o, const MatrixXcd& s) -> MatrixXcd { return -I * (o * s); };
  MatrixXcd sa = sigma(t0).entries;
  for (long step = 1; step <= steps; ++step) {
    const double t = t0 + static_cast<double>(step - 1) * h;
    const MatrixXcd sb = sigma(t + 0.5 * h).entries;
    const MatrixXcd sc = sigma(step == steps ? t1 : t + h).entries;
    const MatrixXcd k1 = rhs(w, sa);
    const MatrixXcd k2 = rhs(w + 0.5 * h * k1, sb);
    const MatrixXcd k3 = rhs(w + 0.5 * h * k2, sb);
    const MatrixXcd k4 = rhs(w + h * k3, sc);
    w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!w.allFinite() || w.norm() > conditioning_limit * std::max(start_norm, 1.0)) {
      throw InstabilityError("Dyson map reconstruction blew up at step " + std::to_string(step),
                             static_cast<int>(step), t);
    }
    sa = sc;
  }
  const double cond = linalg::condition_number(w);
  // No reference metric exists along the integration, so consistency is left
  // to the caller (compare against a closed form when one is known).
  DysonMap out{.matrix = OperatorMatrix(std::move(w), omega0.matrix.basis, omega0.matrix.grid),
               .metric_consistency = 0.0,
               .condition_number = cond,
               .cutoff_pmax = omega0.cutoff_pmax,
               .symbol = std::nullopt};
  return out;
}

}  // namespace niplab
