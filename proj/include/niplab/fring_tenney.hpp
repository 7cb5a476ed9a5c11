#pragma once

#include <array>

#include "niplab/grid.hpp"
#include "niplab/schedule.hpp"

namespace niplab {

/// Schedules of the exponential-product Dyson map plus the constants of the
/// sigma(t) constraint. c1 is carried but unused here.
struct FTParams {
  Schedule alpha = Schedule::constant(0.0);
  Schedule beta = Schedule::constant(0.0);
  Schedule gamma = Schedule::constant(0.0);
  Schedule delta = Schedule::constant(0.0);
  double c1 = 0.0;
  double c2 = 0.0;
  std::array<double, 3> kappas{1.0, 0.0, 0.0};
};

/// Omega = exp(alpha X) exp(beta P^3 + i gamma P^2 + i delta P). The first
/// factor goes through the Pade exponential, the second is exact in the
/// Fourier basis.
OperatorMatrix build_ft_dyson(const FTParams& p, double t, const GridSpec& grid);
/// Omega^-1 from the two factor inverses.
OperatorMatrix build_ft_dyson_inverse(const FTParams& p, double t, const GridSpec& grid);

/// i alpha' X + i beta' P^3 - (3 alpha' beta + gamma') P^2 - (2 i gamma alpha' + delta') P - i delta alpha'.
OperatorMatrix ft_coriolis_analytic(const FTParams& p, double t, const GridSpec& grid);

/// P^2 - P/2 + i(X P^2 + P^2 X)/2 + (m/4) Z2 - (lambda_sq/16) Z4 with the
/// contour images Z2 = -4 - 4iX and Z4 = 16(1 + 2iX - X^2).
OperatorMatrix ft_generator(double m_value, double lambda_sq, const GridSpec& grid);

struct FTConstraintOutput {
  double lambda_sq;
  double mass;
};

/// lambda^2 = 1/(4 sigma^3), m = (4 c2 + sigma'^2 - 2 sigma sigma'') / (4 sigma^2).
FTConstraintOutput ft_constraints(const Schedule& sigma, double c2, double t);

struct MasslessCheck {
  double c2;
  double max_mass;  // max |m(t)| over the samples
  int samples;
};

/// c2 = k0 k2 - k1^2/4 for sigma = k0 + k1 t + k2 t^2, checked at 100 points
/// of [0, 1] where sigma > 0.
MasslessCheck ft_massless_c2(const std::array<double, 3>& kappas);

struct FTHamiltonian {
  OperatorMatrix h;
  OperatorMatrix generator;
  OperatorMatrix coriolis;
  /// Quasi-Hermiticity residual of H against Omega^dagger Omega on the default
  /// probe subspace. Diagnostic only.
  double quasi_hermiticity;
};

FTHamiltonian ft_hamiltonian(const FTParams& p, double m_value, double lambda_sq, double t, const GridSpec& grid);

struct CoriolisConvergence {
  double h;
  double residual_h;
  double residual_half;
  double ratio;  // residual_h / residual_half, about 4 for a second-order error
};

/// Finite-difference check of ft_coriolis_analytic on a probe subspace of
/// smooth states at steps h and h/2.
CoriolisConvergence ft_validate_coriolis(const FTParams& p, double t, double h, const GridSpec& grid);

}  // namespace niplab
