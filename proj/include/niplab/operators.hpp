#pragma once

#include "niplab/grid.hpp"

namespace niplab {

enum class MomentumScheme { fourier, fd2, fd4 };

/// Closed-form harmonic approximation of the avatar well -2 lambda y + 4 lambda^2 y^4.
struct WellAnalysis {
  double y_min;
  double v_min;
  double omega_sq;
  double e0_estimate;
};

OperatorMatrix build_position(const GridSpec& grid);

/// p = -i d/dx. Fourier: exact on grid plane waves; fd2/fd4: periodic
/// antisymmetric central stencils times -i.
OperatorMatrix build_momentum(const GridSpec& grid, MomentumScheme scheme = MomentumScheme::fourier);

/// -d^2/dx^2 as the Fourier multiplier k^2 (the exact square of the Fourier P).
OperatorMatrix build_kinetic(const GridSpec& grid);

/// Radial anharmonic oscillator 1/2(-d^2/dr^2 + (j^2-1)/(4 r^2) + r^2) + lambda^2 r^4
/// on (0, 2L) with Dirichlet ends. Sine-series kinetic term on the n interior
/// points r_k = (k+1) 2L/(n+1).
OperatorMatrix build_aho_radial(double lambda, double j, const GridSpec& grid);

/// Half-line radial coordinates used by build_aho_radial.
Eigen::VectorXd half_line_points(const GridSpec& grid);

/// Wrong-sign partner -D^2 + j/2 - i j lambda r + r^2 - 2 i lambda r^3 - lambda^2 r^4,
/// r = x - i eps.
OperatorMatrix build_qtilde(double lambda, double j, double eps, const GridSpec& grid);

/// -D^2 + lambda^2 X^2 (iX)^delta with the principal branch, 0 <= delta < 2.
OperatorMatrix build_bb(double lambda, double delta, const GridSpec& grid);

/// Real-line image H0 + H1 of -d^2/dz^2 - lambda^2 z^4 on z = -2i sqrt(1 + ix):
/// H0 = P^2 - P/2 + 16 lambda^2 (X^2 - 1), H1 = i(XP^2 + P^2X)/2 - 32 i lambda^2 X.
OperatorMatrix build_jm_mapped(double lambda, const GridSpec& grid);

/// Hermitian avatar -D^2 - 2 lambda X + 4 lambda^2 X^4.
OperatorMatrix build_jm_avatar(double lambda, const GridSpec& grid);

/// 1/2(-D^2 + (j^2-1)/(4 r^2) + r^2) - lambda^2 r^4 with r = x - i eps.
OperatorMatrix build_bg(double lambda, double j, double eps, const GridSpec& grid);

/// Double well -D^2 + j/2 - j lambda X + X^2 - 2 lambda X^3 + lambda^2 X^4.
OperatorMatrix build_bg_avatar(double lambda, double j, const GridSpec& grid);

/// build_jm_mapped with lambda^2 replaced by a (time-sampled) coupling g.
OperatorMatrix build_njm_mapped(double g_value, const GridSpec& grid);

/// -D^2 - 2 sqrt(g) X + 4 g X^4.
OperatorMatrix build_njm_avatar(double g_value, const GridSpec& grid);

/// Hermitian image of the mapped operator under the Dyson map
/// exp(P^3/(96 g) - P): P^4/(64 g) - P/2 + 16 g X^2. Unitarily equivalent to
/// build_njm_avatar (Fourier transform plus the rescaling k = 4 sqrt(g) y).
OperatorMatrix build_njm_textbook(double g_value, const GridSpec& grid);

WellAnalysis analyze_well(double lambda);

/// Grid reflection x_k -> x_{n-k} (x_0 = -L maps to itself), the parity that
/// is compatible with the Fourier wavenumber set.
Eigen::MatrixXcd grid_parity(const GridSpec& grid);

/// ||Pi conj(M) Pi - M||_F / ||M||_F over the reflection-paired grid points.
/// The box edge x_0 = -L is its own mirror image under the periodic
/// reflection, yet its potential value is not real, so it is left out.
double tp_symmetry_residual(const OperatorMatrix& m);

}  // namespace niplab
