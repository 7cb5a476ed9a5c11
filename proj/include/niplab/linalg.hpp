#pragma once

#include <Eigen/Dense>

namespace niplab::linalg {

struct EigenDecomposition {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // right eigenvectors, unit 2-norm columns
};

/// General complex eigenproblem (LAPACK zgeev). Throws Error(numerical) with
/// norm and non-normality diagnostics when the QR iteration fails.
EigenDecomposition eig_general(const Eigen::MatrixXcd& m, bool want_vectors = true);

/// Hermitian eigenproblem (LAPACK zheevr) on the lower triangle of `m`;
/// values ascending.
EigenDecomposition eig_hermitian(const Eigen::MatrixXcd& m, bool want_vectors = true);

/// exp(A) by scaling and squaring around a degree-13 Pade approximant.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// 2-norm condition number from the singular values.
double condition_number(const Eigen::MatrixXcd& m);

}  // namespace niplab::linalg
