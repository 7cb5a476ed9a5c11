#pragma once

#include <optional>
#include <vector>

#include "niplab/fourier.hpp"
#include "niplab/grid.hpp"

namespace niplab {

/// Largest |exponent| kept before the exponential is cut off.
inline constexpr double exponent_guard = 700.0;

struct MetricOperator {
  OperatorMatrix matrix;
  bool positive = false;
  /// Largest |k| kept; modes beyond it are dropped (zero rows/columns).
  double cutoff_pmax = 0.0;
  /// Fourier symbol when the metric is diagonal in momentum space; zero on
  /// dropped modes.
  std::optional<Eigen::VectorXcd> symbol;
};

struct DysonMap {
  OperatorMatrix matrix;
  double metric_consistency = 0.0;  // ||Omega^dagger Omega - Theta||_F / ||Theta||_F
  double condition_number = 1.0;    // on the admissible subspace
  double cutoff_pmax = 0.0;
  std::optional<Eigen::VectorXcd> symbol;
};

/// Cutoff K such that every grid |k| <= K keeps |c3 k^3 + c1 k| < guard. Throws
/// invalid-configuration when only k = 0 survives.
double admissible_cutoff(const GridSpec& grid, double c3, double c1, double guard = exponent_guard);

/// Theta = exp(P^3/(48 lambda^2) - 2P), cut off at the shared admissible K.
MetricOperator build_jm_metric(double lambda, const GridSpec& grid);

/// Omega = exp(P^3/(96 g) - P), same cutoff as the metric with lambda^2 = g.
DysonMap build_njm_dyson(double g_value, const GridSpec& grid);

/// Metric from a given Fourier symbol or dense Hermitian matrix (for tests and
/// user-supplied metrics such as the identity).
MetricOperator metric_from_symbol(const GridSpec& grid, const Eigen::VectorXcd& symbol);
MetricOperator metric_from_matrix(const OperatorMatrix& theta);

/// ||V^dagger (Q^dagger Theta - Theta Q) V||_F / (||Q V||_F ||Theta V||_F) on a
/// probe subspace V of smooth states. Theta acts on the analytic momentum
/// columns when it has a symbol.
double quasi_hermiticity_residual(const OperatorMatrix& q, const MetricOperator& theta,
                                  const ProbeSubspace& probe);
/// Same on the default probe (six Hermite functions of unit width).
double quasi_hermiticity_residual(const OperatorMatrix& q, const MetricOperator& theta);

/// Full-matrix ||Q^dagger Theta - Theta Q||_F / (||Q||_F ||Theta||_F).
double quasi_hermiticity_residual_full(const OperatorMatrix& q, const MetricOperator& theta);

/// Principal positive square root. Throws not-a-metric on a non-positive
/// eigenvalue of the admissible part.
DysonMap factor_metric(const MetricOperator& theta);

/// Largest Dyson-map dynamic range a similarity may carry before the result
/// is dominated by roundoff.
inline constexpr double conditioning_limit = 1e12;

struct Hermitized {
  /// Dense path: n x n on the position grid. Fourier-diagonal path: the block
  /// over `modes` (FFT indices) in the momentum basis.
  OperatorMatrix h;
  std::vector<int> modes;
  /// ||C - C^dagger||_F / ||C||_F for the compression C = V^dagger h V onto the
  /// default probe subspace.
  double residual;
  /// ||h - h^dagger||_F / ||h||_F of the returned matrix itself.
  double matrix_residual;
  double condition_number;
  double cutoff_pmax;
};

/// h = Omega H Omega^-1. A Fourier-diagonal Omega is applied entrywise in the
/// momentum basis, restricted to the modes |k| <= K on which its dynamic
/// range stays below conditioning_limit. A dense Omega is inverted by LU and
/// rejected with a conditioning error above that limit.
Hermitized hermitize(const OperatorMatrix& h, const DysonMap& omega);

enum class MapDirection { to_textbook, to_ketket };

Eigen::VectorXcd map_state(const Eigen::VectorXcd& v, const DysonMap& omega, MapDirection direction);

}  // namespace niplab
