#pragma once

#include <Eigen/Dense>

#include "niplab/grid.hpp"

namespace niplab {

/// Unitary DFT with physical phases: F(m, j) = exp(-i k_m x_j) / sqrt(n).
Eigen::MatrixXcd dft_matrix(const GridSpec& grid);

/// Position-grid matrix of the operator that is diagonal in the discrete
/// Fourier basis with the given symbol (FFT order, see GridSpec::wavenumbers).
Eigen::MatrixXcd fourier_multiplier(const GridSpec& grid, const Eigen::VectorXcd& symbol);

/// Columns mapped between position samples and momentum amplitudes.
Eigen::MatrixXcd to_momentum(const GridSpec& grid, const Eigen::MatrixXcd& position);
Eigen::MatrixXcd from_momentum(const GridSpec& grid, const Eigen::MatrixXcd& momentum);

/// Orthonormal set of smooth, localized, band-limited test states held in both
/// representations. The momentum columns are evaluated analytically, so their
/// tails carry the true super-exponential decay instead of roundoff; this is
/// what lets unbounded momentum multipliers act on them without amplifying
/// noise.
struct ProbeSubspace {
  Eigen::MatrixXcd position;
  Eigen::MatrixXcd momentum;

  Eigen::Index size() const noexcept { return position.cols(); }
};

/// First `count` Hermite functions of length scale `width` centred at `center`.
ProbeSubspace hermite_probe(const GridSpec& grid, int count = 6, double width = 1.0,
                            double center = 0.0);

/// Applies a Fourier symbol exactly to the analytic momentum columns of a probe.
Eigen::MatrixXcd apply_symbol(const GridSpec& grid, const Eigen::VectorXcd& symbol,
                              const ProbeSubspace& probe);

}  // namespace niplab
