/** \file bem_pencil.hpp
 *  The discretized operator pencil and its reduced form on a TriMesh.
 *
 *  With A = (1/2) I + K*, M = K*^2 - (1/4) I and B = M S^{-1}:
 *    lambda_full(z)  = (z^2 I + A) (-(1/2) I + K* + k^2 K1) - B Sk
 *    lambda_tilde(z) = -(1/2) I + K* + L(z)
 *    L(z) = (1/h^2) (z^2 I + A) K1 - (1/h^2) B (S1 - i/(4 pi k) ones w^T)
 *  where k = z/h.  In exact arithmetic z^2 lambda_tilde = lambda_full; the
 *  reduced form stays bounded at z -> 0 and is what the eigensolver sees.
 */
#pragma once

#include <Eigen/Core>
#include <memory>

#include "nlpbem/bem_assemble.hpp"
#include "nlpbem/mesh.hpp"
#include "nlpbem/nep_beyn.hpp"

namespace nlpbem::bem {

class PencilEvaluator {
 public:
  /** Assembles and caches the static operators.  perturb_kstar shifts K*
   *  by x I in the two additive appearances inside lambda_tilde only (a
   *  deliberate consistency-breaking control; B and lambda_full keep the
   *  unperturbed K*). */
  PencilEvaluator(TriMesh mesh, double h, double perturb_kstar = 0.0);

  Eigen::MatrixXcd lambda_tilde(cplx z) const;
  Eigen::MatrixXcd lambda_tilde_dz(cplx z) const;
  void lambda_tilde_with_dz(cplx z, Eigen::MatrixXcd& t,
                            Eigen::MatrixXcd& dt) const;
  Eigen::MatrixXcd lambda_full(cplx z) const;

  /** Same as lambda_tilde but reusing smooth blocks the caller already
   *  assembled at k = z/h (avoids a second assembly in the solve chain). */
  Eigen::MatrixXcd lambda_tilde_from(const SmoothBlocks& sm, cplx z) const;

  const TriMesh& mesh() const { return mesh_; }
  double h() const { return h_; }
  const Eigen::MatrixXd& S() const { return S_; }
  const Eigen::MatrixXd& Kstar() const { return Kstar_; }
  const Eigen::MatrixXd& B() const { return B_; }

 private:
  TriMesh mesh_;
  double h_;
  double perturb_kstar_;
  Eigen::MatrixXd S_, Kstar_, B_;
  Eigen::RowVectorXd wrow_;  // triangle areas (quadrature weights)

  void check_z(cplx z, const char* who) const;
};

/** Adapter presenting the reduced pencil to the eigensolver; the
 *  inner-product weights are the triangle areas. */
class BemPencil : public nep::PencilOperator {
 public:
  explicit BemPencil(std::shared_ptr<const PencilEvaluator> ev)
      : ev_(std::move(ev)) {}
  Eigen::Index size() const override { return ev_->mesh().n(); }
  Eigen::MatrixXcd T(cplx z) const override { return ev_->lambda_tilde(z); }
  Eigen::MatrixXcd dT(cplx z) const override {
    return ev_->lambda_tilde_dz(z);
  }
  void T_and_dT(cplx z, Eigen::MatrixXcd& t,
                Eigen::MatrixXcd& dt) const override {
    ev_->lambda_tilde_with_dz(z, t, dt);
  }
  Eigen::VectorXd weights() const override { return ev_->mesh().areas; }
  const PencilEvaluator& evaluator() const { return *ev_; }

 private:
  std::shared_ptr<const PencilEvaluator> ev_;
};

}  // namespace nlpbem::bem
