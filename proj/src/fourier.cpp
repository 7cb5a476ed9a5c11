#include "niplab/fourier.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "niplab/errors.hpp"

namespace niplab {

namespace {

std::vector<cplx> roots_of_unity(int n) {
  std::vector<cplx> w(n);
  for (int j = 0; j < n; ++j) {
    const double phase = 2.0 * std::numbers::pi * j / n;
    w[j] = cplx(std::cos(phase), std::sin(phase));
  }
  return w;
}

void require_even(const GridSpec& grid) {
  if (!grid.is_even()) {
    throw Error(ErrorCode::invalid_configuration,
                "Fourier discretization needs an even number of grid points");
  }
}

}  // namespace

Eigen::MatrixXcd dft_matrix(const GridSpec& grid) {
  require_even(grid);
  const int n = grid.n_points();
  const auto w = roots_of_unity(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  // exp(-i k_m x_j) = (-1)^m * w^{-(m j mod n)} because k_m L = pi m.
  Eigen::MatrixXcd f(n, n);
  for (int m = 0; m < n; ++m) {
    const double sign = (m % 2 == 0) ? norm : -norm;
    for (int j = 0; j < n; ++j) {
      const int idx = static_cast<int>((static_cast<long>(m) * j) % n);
      f(m, j) = sign * std::conj(w[idx]);
    }
  }
  return f;
}

Eigen::MatrixXcd fourier_multiplier(const GridSpec& grid, const Eigen::VectorXcd& symbol) {
  require_even(grid);
  const int n = grid.n_points();
  if (symbol.size() != n) {
    throw Error(ErrorCode::invalid_configuration, "symbol length does not match grid");
  }
  const auto w = roots_of_unity(n);
  // Circulant: M(j, l) = c((j - l) mod n), c_d = (1/n) sum_m s_m w^{m d}.
  Eigen::VectorXcd c(n);
  for (int d = 0; d < n; ++d) {
    cplx acc(0.0, 0.0);
    for (int m = 0; m < n; ++m) {
      acc += symbol(m) * w[static_cast<int>((static_cast<long>(m) * d) % n)];
    }
    c(d) = acc / static_cast<double>(n);
  }
  Eigen::MatrixXcd out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) out(j, l) = c(((j - l) % n + n) % n);
  }
  return out;
}

Eigen::MatrixXcd to_momentum(const GridSpec& grid, const Eigen::MatrixXcd& position) {
  return dft_matrix(grid) * position;
}

Eigen::MatrixXcd from_momentum(const GridSpec& grid, const Eigen::MatrixXcd& momentum) {
  return dft_matrix(grid).adjoint() * momentum;
}

ProbeSubspace hermite_probe(const GridSpec& grid, int count, double width, double center) {
  if (count < 1 || count > grid.n_points() / 4) {
    throw Error(ErrorCode::invalid_configuration, "probe size out of range");
  }
  if (!(width > 0.0)) {
    throw Error(ErrorCode::invalid_configuration, "probe width must be positive");
  }
  const int n = grid.n_points();
  const Eigen::VectorXd k = grid.wavenumbers();
  // The Fourier image of h_j(x / w) is proportional to (-i)^j h_j(k w);
  // a displacement by `center` multiplies it by exp(-i k center).
  Eigen::MatrixXcd vhat(n, count);
  for (int m = 0; m < n; ++m) {
    const double s = k(m) * width;
    const double gauss = std::exp(-0.5 * s * s);
    const cplx shift = std::polar(1.0, -k(m) * center);
    double h_prev = 0.0;
    double h_curr = gauss;  // normalized Hermite recursion, h_0
    cplx phase(1.0, 0.0);
    for (int j = 0; j < count; ++j) {
      vhat(m, j) = phase * h_curr * shift;
      const double h_next = std::sqrt(2.0 / (j + 1)) * s * h_curr - std::sqrt(double(j) / (j + 1)) * h_prev;
      h_prev = h_curr;
      h_curr = h_next;
      phase *= cplx(0.0, -1.0);
    }
  }
  // Orthonormalize by right-multiplying with the inverse Cholesky factor; row
  // scaling is preserved, so analytic tails stay exact.
  const Eigen::MatrixXcd gram = vhat.adjoint() * vhat;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "probe functions are numerically dependent");
  }
  const Eigen::MatrixXcd r = llt.matrixU();
  Eigen::MatrixXcd q = r.transpose().triangularView<Eigen::Lower>().solve(vhat.transpose()).transpose();
  ProbeSubspace probe;
  probe.momentum = std::move(q);
  probe.position = from_momentum(grid, probe.momentum);
  return probe;
}

Eigen::MatrixXcd apply_symbol(const GridSpec& grid, const Eigen::VectorXcd& symbol,
                              const ProbeSubspace& probe) {
  if (symbol.size() != probe.momentum.rows()) {
    throw Error(ErrorCode::invalid_configuration, "symbol length does not match probe");
  }
  return from_momentum(grid, symbol.asDiagonal() * probe.momentum);
}

}  // namespace niplab
