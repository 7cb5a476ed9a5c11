#include "niplab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "niplab/errors.hpp"

namespace niplab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_configuration: return "invalid-configuration";
    case ErrorCode::domain: return "domain";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::singular_potential: return "singular-potential";
    case ErrorCode::not_a_metric: return "not-a-metric";
    case ErrorCode::conditioning: return "conditioning";
    case ErrorCode::degenerate_state: return "degenerate-state";
    case ErrorCode::derivative: return "derivative";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::instability: return "instability";
  }
  return "unknown";
}

bool Error::is_configuration() const noexcept {
  switch (code_) {
    case ErrorCode::invalid_configuration:
    case ErrorCode::domain:
    case ErrorCode::unsupported:
    case ErrorCode::singular_potential:
    case ErrorCode::derivative:
      return true;
    default:
      return false;
  }
}

const char* to_string(Basis basis) {
  switch (basis) {
    case Basis::position_grid: return "position-grid";
    case Basis::momentum_grid: return "momentum-grid";
    case Basis::half_line_grid: return "half-line-grid";
  }
  return "unknown";
}

GridSpec::GridSpec(int n_points, double half_width)
    : n_points_(n_points), half_width_(half_width) {
  if (n_points < 8) {
    throw Error(ErrorCode::invalid_configuration,
                "grid needs at least 8 points, got " + std::to_string(n_points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(ErrorCode::invalid_configuration, "grid half-width must be positive");
  }
}

double GridSpec::momentum_cutoff() const noexcept {
  return std::numbers::pi / spacing();
}

Eigen::VectorXd GridSpec::points() const {
  Eigen::VectorXd x(n_points_);
  for (int k = 0; k < n_points_; ++k) x(k) = point(k);
  return x;
}

Eigen::VectorXd GridSpec::wavenumbers() const {
  if (!is_even()) {
    throw Error(ErrorCode::invalid_configuration,
                "Fourier wavenumbers need an even number of grid points");
  }
  const int n = n_points_;
  const double dk = 2.0 * std::numbers::pi / (n * spacing());
  Eigen::VectorXd k(n);
  for (int m = 0; m < n; ++m) {
    const int signed_m = m <= n / 2 ? m : m - n;
    k(m) = dk * signed_m;
  }
  return k;
}

GridSpec quartic_default_grid() { return GridSpec(512, 10.0); }
GridSpec shifted_default_grid() { return GridSpec(512, 12.0); }
GridSpec evolution_default_grid() { return GridSpec(64, 8.0); }

OperatorMatrix::OperatorMatrix(Eigen::MatrixXcd m, Basis b, GridSpec g)
    : entries(std::move(m)), basis(b), grid(g) {
  if (entries.rows() != entries.cols()) {
    throw Error(ErrorCode::invalid_configuration, "operator matrix must be square");
  }
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(entries.adjoint(), basis, grid);
}

namespace {
void require_compatible(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim() || a.basis != b.basis || !(a.grid == b.grid)) {
    throw Error(ErrorCode::invalid_configuration,
                "operators live on different grids or bases");
  }
}
}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_compatible(a, b);
  return OperatorMatrix(a.entries + b.entries, a.basis, a.grid);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_compatible(a, b);
  return OperatorMatrix(a.entries - b.entries, a.basis, a.grid);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& a) {
  return OperatorMatrix(s * a.entries, a.basis, a.grid);
}

double hermiticity_residual(const Eigen::MatrixXcd& m) {
  const double scale = m.stableNorm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).stableNorm() / scale;
}

double relative_difference(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double diff = (a - b).stableNorm();
  const double scale = b.stableNorm();
  if (scale == 0.0) return diff == 0.0 ? 0.0 : diff;
  return diff / scale;
}

}  // namespace niplab
