#include "niplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <lapacke.h>

#include "niplab/errors.hpp"

namespace niplab::linalg {

namespace {

lapack_complex_double* as_lapack(std::complex<double>* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

std::string diagnostics(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  const double norm = m.stableNorm();
  const double commutator = (m * m.adjoint() - m.adjoint() * m).stableNorm();
  os << "||M||_F=" << norm << ", ||[M,M^dagger]||_F/||M||_F^2="
     << (norm > 0 ? commutator / (norm * norm) : 0.0)
     << ", finite=" << (m.allFinite() ? "yes" : "no");
  return os.str();
}

}  // namespace

EigenDecomposition eig_general(const Eigen::MatrixXcd& m, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (!m.allFinite()) {
    throw Error(ErrorCode::numerical, "eigensolve on non-finite matrix: " + diagnostics(m));
  }
  Eigen::MatrixXcd work = m;
  EigenDecomposition out;
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, as_lapack(work.data()), n,
      as_lapack(out.values.data()), nullptr, n,
      want_vectors ? as_lapack(out.vectors.data()) : nullptr, n);
  if (info != 0) {
    throw Error(ErrorCode::numerical,
                "zgeev failed (info=" + std::to_string(info) + "): " + diagnostics(m));
  }
  return out;
}

EigenDecomposition eig_hermitian(const Eigen::MatrixXcd& m, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (!m.allFinite()) {
    throw Error(ErrorCode::numerical, "eigensolve on non-finite matrix: " + diagnostics(m));
  }
  // MRRR rather than divide and conquer: the zheevd shipped with some
  // OpenBLAS builds returns inaccurate eigenvectors for n >= 512.
  Eigen::MatrixXcd work = m;
  Eigen::VectorXd w(n);
  EigenDecomposition out;
  if (want_vectors) out.vectors.resize(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'L', n, as_lapack(work.data()), n, 0.0, 0.0, 0, 0, 0.0,
      &found, w.data(), want_vectors ? as_lapack(out.vectors.data()) : nullptr, n, support.data());
  if (info != 0 || found != n) {
    throw Error(ErrorCode::numerical,
                "zheevr failed (info=" + std::to_string(info) + "): " + diagnostics(m));
  }
  out.values = w.cast<std::complex<double>>();
  return out;
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  // Higham (2005) coefficients for the [13/13] approximant.
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) {
    throw Error(ErrorCode::numerical, "matrix exponential of a non-finite matrix");
  }
  int s = 0;
  if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  const Eigen::MatrixXcd x = a / std::ldexp(1.0, s);

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd x2 = x * x;
  const Eigen::MatrixXcd x4 = x2 * x2;
  const Eigen::MatrixXcd x6 = x4 * x2;
  const Eigen::MatrixXcd u_inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  const Eigen::MatrixXcd u =
      x * (x6 * u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const Eigen::MatrixXcd v_inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  const Eigen::MatrixXcd v = x6 * v_inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

double condition_number(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 1.0;
  if (!m.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd work = m;
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  Eigen::VectorXd sv(std::min(rows, cols));
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, as_lapack(work.data()), rows,
                     sv.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw Error(ErrorCode::numerical, "zgesdd failed (info=" + std::to_string(info) + ")");
  }
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace niplab::linalg
