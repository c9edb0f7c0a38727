/** \file lapack.hpp
 *  \brief Thin RAII wrappers over the dense LAPACK routines used by the
 *         library: complex LU with plain/transposed solves and condition
 *         estimation, and the real nonsymmetric eigenproblem.
 */
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace nlpbem::la {

using cplx = std::complex<double>;

/// Dense partial-pivoting LU of a complex matrix.  Keeps the factors and the
/// 1-norm of the original matrix so solves and condition estimates can be
/// served repeatedly without refactorizing.
class ComplexLU {
 public:
  /// Factorizes a copy of A.  \throws AssemblyError on exact singularity.
  explicit ComplexLU(Eigen::MatrixXcd A);

  /// Solves A X = B.
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& B) const;

  /// Solves A^T X = B (plain transpose, no conjugation).
  Eigen::MatrixXcd solve_transposed(const Eigen::MatrixXcd& B) const;

  /// Reciprocal 1-norm condition estimate of the factorized matrix.
  double rcond() const;

  Eigen::Index rows() const { return lu_.rows(); }

 private:
  Eigen::MatrixXcd lu_;
  std::vector<int> ipiv_;
  double anorm_ = 0.0;
};

/// Eigen-decomposition result of a real nonsymmetric matrix.
struct RealEigs {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  ///< empty unless requested
};

/// Eigenvalues (and optionally right eigenvectors) of a real square matrix.
RealEigs real_eigs(const Eigen::MatrixXd& A, bool with_vectors = false);

}  // namespace nlpbem::la
