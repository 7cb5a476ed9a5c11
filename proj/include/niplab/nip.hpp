#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "niplab/grid.hpp"
#include "niplab/metric.hpp"
#include "niplab/schedule.hpp"

namespace niplab {

/// Operator-valued function of time on a fixed grid.
using OperatorFamily = std::function<OperatorMatrix(double)>;

struct EvolutionState {
  double t = 0.0;
  Eigen::VectorXcd ket;
  Eigen::VectorXcd ketket;
};

/// exp(z) - 1 without cancellation for small |z|.
cplx complex_expm1(cplx z);

/// <<psi|psi> = ketket^dagger ket.
cplx pairing(const EvolutionState& s);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<cplx> norms;
  std::vector<std::pair<std::string, std::vector<cplx>>> observables;
  double drift = 0.0;
  double step = 0.0;
  EvolutionState final_state;
};

struct EvolutionOptions {
  double abort_threshold = 1e-2;
  std::vector<std::pair<std::string, OperatorFamily>> observables;
};

/// Sigma(t) = -i gdot(t) P^3 / (96 g(t)^2), Fourier-diagonal.
OperatorMatrix coriolis_njm(const Schedule& g, double t, const GridSpec& grid);

/// G = H - Sigma.
OperatorMatrix generator_G(const OperatorMatrix& h, const OperatorMatrix& sigma);

/// The closed-form non-stationary Jones-Mateo family over a schedule g(t).
///
/// The Hamiltonian is realized as H = Omega^-1 h Omega with the Hermitian
/// textbook operator h = P^4/(64 g) - P/2 + 16 g X^2, the exact grid image of
/// the mapped operator under the Dyson map exp(P^3/(96 g) - P). Unlike the
/// direct X/P assembly it carries no spurious box eigenvalues, so it can be
/// time-stepped.
class NjmFamily {
 public:
  /// Checks g(t) > 0 over the schedule domain.
  NjmFamily(Schedule g, GridSpec grid);

  const Schedule& schedule() const noexcept { return g_; }
  const GridSpec& grid() const noexcept { return grid_; }

  double coupling(double t) const;
  Eigen::VectorXcd dyson_symbol(double t) const;
  /// k^3/(96 g) - k on every grid mode, without the overflow cutoff.
  Eigen::VectorXcd dyson_exponent(double t) const;
  DysonMap dyson(double t) const;
  MetricOperator metric(double t) const;
  OperatorMatrix coriolis(double t) const;
  OperatorMatrix textbook(double t) const;
  /// Analytic d h / dt.
  OperatorMatrix textbook_rate(double t) const;
  /// Omega^-1 q Omega for an operator q of the textbook picture.
  OperatorMatrix pull_back(const OperatorMatrix& q, double t) const;
  OperatorMatrix hamiltonian(double t) const;
  OperatorMatrix generator(double t) const;
  /// K = Omega^-1 (i dh/dt) Omega.
  OperatorMatrix hamiltonian_source(double t) const;

  /// Gaussian ket exp(-(x - center)^2 / (2 width^2)) built in momentum space,
  /// ketket = Theta(t0) ket, scaled so that the pairing is 1.
  EvolutionState initial_state(double t0, double center = 0.0, double width = 1.0) const;

 private:
  Schedule g_;
  GridSpec grid_;
};

/// RK4 co-integration of i d/dt ket = G ket and i d/dt ketket = G^dagger ketket
/// from s0.t to t1 with (dt rounded to divide the interval). Records the
/// pairing and each observable's normalized pairing at every step. Throws
/// InstabilityError when the drift passes the abort threshold.
EvolutionTrace evolve_pair(const OperatorFamily& g_of_t, const EvolutionState& s0, double t1, double dt,
                           const EvolutionOptions& options = {});

/// <<psi|Q|psi> / <<psi|psi>.
cplx expectation(const EvolutionState& s, const OperatorMatrix& q);

/// |psi><<psi| / <<psi|psi>.
OperatorMatrix projector(const EvolutionState& s, const GridSpec& grid);

struct MetricEvolutionResiduals {
  double r21;        // i dTheta/dt vs Theta Sigma - Sigma^dagger Theta
  double r22;        // i dTheta/dt vs G^dagger Theta - Theta G
  double agreement;  // the two right-hand sides against each other
};

MetricEvolutionResiduals metric_evolution_residuals(const OperatorFamily& theta, const OperatorFamily& sigma,
                                                    const OperatorFamily& g, double t, double h = 1e-4);

/// i dQ/dt vs Q Sigma - Sigma Q + K. An empty `k` means K = 0.
double heisenberg_residual(const OperatorFamily& q, const OperatorFamily& sigma, const OperatorFamily& k,
                           double t, double h = 1e-4);

struct HamiltonianForms {
  double sigma_form;  // i dH/dt vs H Sigma - Sigma H + K
  double g_form;      // i dH/dt vs G H - H G + K
  double agreement;
};

HamiltonianForms heisenberg_hamiltonian_forms(const OperatorFamily& h, const OperatorFamily& sigma,
                                              const OperatorFamily& g, const OperatorFamily& k, double t,
                                              double h_step = 1e-4);

/// ||Sigma V - i Omega^-1(t) (Omega(t+h) - Omega(t-h)) V / (2h)||_F / ||Sigma V||_F.
/// Pass the identity as V for the full-matrix residual.
double coriolis_fd_residual(const OperatorFamily& omega, const OperatorFamily& omega_inverse,
                            const OperatorMatrix& sigma, double t, double h, const Eigen::MatrixXcd& columns);

/// Exponent-level variant for a Fourier-diagonal Dyson map Omega = exp(E(t)):
/// i Omega^-1 (Omega(t+h) - Omega(t-h)) / (2h) is formed per mode as
/// i (expm1(E(t+h) - E(t)) - expm1(E(t-h) - E(t))) / (2h) and applied to the
/// analytic momentum columns of the probe. No large quantities are subtracted,
/// so the residual shows the O(h^2) truncation error down to small h.
double coriolis_fd_residual_diagonal(const std::function<Eigen::VectorXcd(double)>& exponent,
                                     const OperatorMatrix& sigma, double t, double h, const ProbeSubspace& probe);

/// RK4 integration of d Omega/dt = -i Omega Sigma from t0 to t1.
DysonMap reconstruct_dyson(const OperatorFamily& sigma, const DysonMap& omega0, double t0, double t1, double dt);

}  // namespace niplab
