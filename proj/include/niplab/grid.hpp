#pragma once

#include <complex>

#include <Eigen/Dense>

namespace niplab {

using cplx = std::complex<double>;

enum class Basis { position_grid, momentum_grid, half_line_grid };

const char* to_string(Basis basis);

/// Uniform grid x_k = -L + k*dx on [-L, L), dx = 2L/n.
class GridSpec {
 public:
  GridSpec(int n_points, double half_width);

  int n_points() const noexcept { return n_points_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return 2.0 * half_width_ / n_points_; }
  /// Largest representable wavenumber, pi/dx.
  double momentum_cutoff() const noexcept;
  bool is_even() const noexcept { return n_points_ % 2 == 0; }

  double point(int k) const noexcept { return -half_width_ + k * spacing(); }
  Eigen::VectorXd points() const;

  /// Discrete Fourier wavenumbers in FFT order; the Nyquist entry is +pi/dx
  /// so that the set lies in (-p_max, p_max].
  Eigen::VectorXd wavenumbers() const;

  bool operator==(const GridSpec&) const = default;

 private:
  int n_points_;
  double half_width_;
};

/// Spectral grids for quartic-confined models, shifted-line models and for the
/// time-dependent interaction-picture machinery.
GridSpec quartic_default_grid();
GridSpec shifted_default_grid();
GridSpec evolution_default_grid();

/// Dense complex matrix that represents an operator on a grid.
struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  Basis basis = Basis::position_grid;
  GridSpec grid;

  OperatorMatrix(Eigen::MatrixXcd m, Basis b, GridSpec g);

  Eigen::Index dim() const noexcept { return entries.rows(); }
  OperatorMatrix adjoint() const;
};

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(cplx s, const OperatorMatrix& a);

/// ||M - M^dagger||_F / ||M||_F, zero for the zero matrix.
double hermiticity_residual(const Eigen::MatrixXcd& m);

/// ||A - B||_F / ||B||_F with overflow-safe norms; zero when both vanish.
double relative_difference(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace niplab
