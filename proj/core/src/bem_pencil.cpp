/** \file bem_pencil.cpp */
#include "nlpbem/bem_pencil.hpp"

#include <Eigen/LU>
#include <cmath>

#include "nlpbem/errors.hpp"

namespace nlpbem::bem {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kFourPi = 4.0 * M_PI;

// Real x complex product via two real GEMMs.
Eigen::MatrixXcd rc_mul(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows(), B.cols());
  out.real() = A * B.real();
  out.imag() = A * B.imag();
  return out;
}

}  // namespace

PencilEvaluator::PencilEvaluator(TriMesh mesh, double h, double perturb_kstar)
    : mesh_(std::move(mesh)), h_(h), perturb_kstar_(perturb_kstar) {
  if (!(h_ > 0.0)) throw DomainError("PencilEvaluator: h must be positive");
  if (mesh_.areas.size() != mesh_.n()) finalize_mesh(mesh_);
  const StaticOperators st = assemble_static(mesh_);
  S_ = st.S;
  Kstar_ = st.Kstar;
  const Eigen::Index n = mesh_.n();
  // B = (K*^2 - I/4) S^{-1} via the transposed solve: B^T = S^{-T} M^T.
  Eigen::MatrixXd M = Kstar_ * Kstar_;
  M.diagonal().array() -= 0.25;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(S_.transpose());
  B_ = lu.solve(M.transpose()).transpose();
  wrow_ = mesh_.areas.transpose();
  (void)n;
}

void PencilEvaluator::check_z(cplx z, const char* who) const {
  if (z == cplx(0.0, 0.0))
    throw SingularityError(std::string(who) + ": z = 0 is outside the pencil domain");
}

Eigen::MatrixXcd PencilEvaluator::lambda_tilde(cplx z) const {
  check_z(z, "lambda_tilde");
  return lambda_tilde_from(assemble_smooth(mesh_, z / h_, false), z);
}

Eigen::MatrixXcd PencilEvaluator::lambda_tilde_from(const SmoothBlocks& sm,
                                                    cplx z) const {
  check_z(z, "lambda_tilde_from");
  const Eigen::Index n = mesh_.n();
  const cplx k = z / h_;
  // S1 with the rank-one remainder of the Helmholtz kernel folded in.
  Eigen::MatrixXcd S1t = sm.S1;
  S1t.noalias() -=
      (kI / (kFourPi * k)) * (Eigen::VectorXcd::Ones(n) * wrow_.cast<cplx>());

  Eigen::MatrixXd half_k = Kstar_;
  half_k.diagonal().array() += 0.5 + perturb_kstar_;

  Eigen::MatrixXcd T = rc_mul(half_k, sm.K1);
  T.noalias() += (z * z) * sm.K1;
  T.noalias() -= rc_mul(B_, S1t);
  T /= (h_ * h_);
  T += Kstar_.cast<cplx>();
  T.diagonal().array() += cplx(-0.5 + perturb_kstar_, 0.0);
  return T;
}

Eigen::MatrixXcd PencilEvaluator::lambda_tilde_dz(cplx z) const {
  Eigen::MatrixXcd t, dt;
  lambda_tilde_with_dz(z, t, dt);
  return dt;
}

void PencilEvaluator::lambda_tilde_with_dz(cplx z, Eigen::MatrixXcd& t,
                                           Eigen::MatrixXcd& dt) const {
  check_z(z, "lambda_tilde_with_dz");
  const Eigen::Index n = mesh_.n();
  const cplx k = z / h_;
  const SmoothBlocks sm = assemble_smooth(mesh_, k, true);
  const Eigen::MatrixXcd ones_w =
      Eigen::VectorXcd::Ones(n) * wrow_.cast<cplx>();

  Eigen::MatrixXd half_k = Kstar_;
  half_k.diagonal().array() += 0.5 + perturb_kstar_;

  {
    Eigen::MatrixXcd S1t = sm.S1;
    S1t.noalias() -= (kI / (kFourPi * k)) * ones_w;
    t = rc_mul(half_k, sm.K1);
    t.noalias() += (z * z) * sm.K1;
    t.noalias() -= rc_mul(B_, S1t);
    t /= (h_ * h_);
    t += Kstar_.cast<cplx>();
    t.diagonal().array() += cplx(-0.5 + perturb_kstar_, 0.0);
  }
  {
    Eigen::MatrixXcd dS1t = sm.dS1;
    dS1t.noalias() += (kI / (kFourPi * k * k)) * ones_w;
    dt = rc_mul(half_k, sm.dK1);
    dt.noalias() += (z * z) * sm.dK1;
    dt.noalias() -= rc_mul(B_, dS1t);
    dt /= (h_ * h_ * h_);
    dt.noalias() += (2.0 * z / (h_ * h_)) * sm.K1;
  }
}

Eigen::MatrixXcd PencilEvaluator::lambda_full(cplx z) const {
  check_z(z, "lambda_full");
  const Eigen::Index n = mesh_.n();
  const cplx k = z / h_;
  const SmoothBlocks sm = assemble_smooth(mesh_, k, false);

  Eigen::MatrixXcd F2 = Kstar_.cast<cplx>();
  F2.diagonal().array() -= 0.5;
  F2.noalias() += (k * k) * sm.K1;

  Eigen::MatrixXd A = Kstar_;
  A.diagonal().array() += 0.5;

  Eigen::MatrixXcd T = rc_mul(A, F2);
  T.noalias() += (z * z) * F2;

  Eigen::MatrixXcd Sk = S_.cast<cplx>();
  Sk.noalias() -=
      (kI * k / kFourPi) * (Eigen::VectorXcd::Ones(n) * wrow_.cast<cplx>());
  Sk.noalias() += (k * k) * sm.S1;
  T.noalias() -= rc_mul(B_, Sk);
  return T;
}

}  // namespace nlpbem::bem
