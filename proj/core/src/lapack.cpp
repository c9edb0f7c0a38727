/** \file lapack.cpp */
#include "nlpbem/lapack.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nlpbem/errors.hpp"

namespace nlpbem::la {

namespace {

double one_norm(const Eigen::MatrixXcd& A) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    best = std::max(best, A.col(j).cwiseAbs().sum());
  return best;
}

}  // namespace

ComplexLU::ComplexLU(Eigen::MatrixXcd A) : lu_(std::move(A)) {
  if (lu_.rows() != lu_.cols())
    throw AssemblyError("ComplexLU: matrix must be square");
  anorm_ = one_norm(lu_);
  ipiv_.resize(static_cast<size_t>(lu_.rows()));
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(),
                                         n, ipiv_.data());
  if (info < 0) throw AssemblyError("ComplexLU: invalid argument to zgetrf");
  if (info > 0) throw AssemblyError("ComplexLU: exactly singular matrix");
}

Eigen::MatrixXcd ComplexLU::solve(const Eigen::MatrixXcd& B) const {
  if (B.rows() != lu_.rows())
    throw AssemblyError("ComplexLU::solve: dimension mismatch");
  Eigen::MatrixXcd X = B;
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const lapack_int nrhs = static_cast<lapack_int>(X.cols());
  const lapack_int info =
      LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, nrhs, lu_.data(), n,
                     ipiv_.data(), X.data(), n);
  if (info != 0) throw AssemblyError("ComplexLU::solve: zgetrs failed");
  return X;
}

Eigen::MatrixXcd ComplexLU::solve_transposed(const Eigen::MatrixXcd& B) const {
  if (B.rows() != lu_.rows())
    throw AssemblyError("ComplexLU::solve_transposed: dimension mismatch");
  Eigen::MatrixXcd X = B;
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const lapack_int nrhs = static_cast<lapack_int>(X.cols());
  const lapack_int info =
      LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'T', n, nrhs, lu_.data(), n,
                     ipiv_.data(), X.data(), n);
  if (info != 0)
    throw AssemblyError("ComplexLU::solve_transposed: zgetrs failed");
  return X;
}

double ComplexLU::rcond() const {
  double rc = 0.0;
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const lapack_int info = LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu_.data(),
                                         n, anorm_, &rc);
  if (info != 0) throw AssemblyError("ComplexLU::rcond: zgecon failed");
  return rc;
}

RealEigs real_eigs(const Eigen::MatrixXd& A, bool with_vectors) {
  if (A.rows() != A.cols()) throw AssemblyError("real_eigs: square matrix required");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd work = A;
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr;
  if (with_vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_dgeev(
      LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, work.data(), n,
      wr.data(), wi.data(), nullptr, n, with_vectors ? vr.data() : nullptr, n);
  if (info != 0) throw AssemblyError("real_eigs: dgeev did not converge");

  RealEigs out;
  out.values.resize(n);
  for (lapack_int i = 0; i < n; ++i) out.values[i] = cplx(wr[i], wi[i]);
  if (with_vectors) {
    out.vectors.resize(n, n);
    lapack_int j = 0;
    while (j < n) {
      if (wi[j] != 0.0 && j + 1 < n) {
        // dgeev packs a conjugate pair as (real part, imaginary part).
        out.vectors.col(j) =
            vr.col(j).cast<cplx>() + cplx(0, 1) * vr.col(j + 1).cast<cplx>();
        out.vectors.col(j + 1) =
            vr.col(j).cast<cplx>() - cplx(0, 1) * vr.col(j + 1).cast<cplx>();
        j += 2;
      } else {
        out.vectors.col(j) = vr.col(j).cast<cplx>();
        j += 1;
      }
    }
  }
  return out;
}

}  // namespace nlpbem::la
