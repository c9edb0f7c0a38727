/** \file bem_scatter.cpp */
#include "nlpbem/bem_scatter.hpp"

#include <Eigen/LU>
#include <cmath>

#include "nlpbem/bem_assemble.hpp"
#include "nlpbem/errors.hpp"
#include "nlpbem/lapack.hpp"

namespace nlpbem::bem {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kFourPi = 4.0 * M_PI;

Eigen::VectorXcd solve_real(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                            const Eigen::VectorXcd& rhs) {
  Eigen::VectorXcd out(rhs.size());
  out.real() = lu.solve(rhs.real().eval());
  out.imag() = lu.solve(rhs.imag().eval());
  return out;
}

}  // namespace

double ExternalField::potential(const Eigen::RowVector3d& x) const {
  switch (kind) {
    case Kind::UniformZ:
      return x[2];
    case Kind::Dipole: {
      // Unit point dipole at (0, 0, 1 + d) with moment along +z.
      const Eigen::RowVector3d xd(0.0, 0.0, 1.0 + d);
      const Eigen::RowVector3d rel = x - xd;
      const double r = rel.norm();
      return rel[2] / (kFourPi * r * r * r);
    }
  }
  return 0.0;
}

FieldSolution solve_scattering(std::shared_ptr<const PencilEvaluator> ev,
                               cplx z, const ExternalField& field) {
  const TriMesh& mesh = ev->mesh();
  const Eigen::Index n = mesh.n();
  const double h = ev->h();
  const cplx k = z / h;

  FieldSolution sol;
  sol.z = z;
  sol.h = h;
  sol.drive = field;
  sol.evaluator = ev;

  Eigen::VectorXcd v_b(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v_b[i] = field.potential(mesh.centroids.row(i));

  // Interior compatibility data: dvn = (-1/2 I + K*) S^{-1} v_b is the
  // normal derivative of the harmonic continuation of the boundary values.
  Eigen::PartialPivLU<Eigen::MatrixXd> luS(ev->S());
  const Eigen::VectorXcd Sinv_vb = solve_real(luS, v_b);
  Eigen::VectorXcd dvn = ev->Kstar() * Sinv_vb;
  dvn.noalias() -= 0.5 * Sinv_vb;
  sol.dvn = dvn;

  // Reduced pencil solve with a conditioning guard.
  const SmoothBlocks sm = assemble_smooth(mesh, k, false);
  const Eigen::MatrixXcd T = ev->lambda_tilde_from(sm, z);
  la::ComplexLU luT(T);
  const double rc = luT.rcond();
  sol.condition_estimate = (rc > 0.0) ? 1.0 / rc : 0.0;
  if (rc < 1e-12)
    throw NearResonanceError(
        "solve_scattering: reduced pencil numerically singular at this z",
        sol.condition_estimate);
  sol.psi = luT.solve((-dvn).eval());
  sol.zeta = sol.psi / h;

  // Boundary trace and normal derivative of the interior Helmholtz layer.
  const cplx wz = mesh.areas.cast<cplx>().dot(sol.zeta);
  sol.rho_b = ev->S() * sol.zeta;
  sol.rho_b.noalias() += (k * k) * (sm.S1 * sol.zeta);
  sol.rho_b.array() -= (kI * k / kFourPi) * wz;
  Eigen::VectorXcd drho = ev->Kstar() * sol.zeta;
  drho.noalias() += (k * k) * (sm.K1 * sol.zeta);
  drho.noalias() -= 0.5 * sol.zeta;

  // Exterior density from the jump condition, then the interior layer.
  Eigen::MatrixXd half_plus = ev->Kstar();
  half_plus.diagonal().array() += 0.5;
  Eigen::PartialPivLU<Eigen::MatrixXd> luH(half_plus);
  sol.q = solve_real(luH, (-h * drho - dvn).eval());
  sol.p = sol.q - (h / (z * z)) * solve_real(luS, sol.rho_b) + Sinv_vb;

  // Induced dipole moment along the drive axis (z for both drive kinds).
  cplx mu = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    mu += sol.q[i] * mesh.areas[i] * mesh.centroids(i, 2);
  sol.dipole_moment = mu / kFourPi;
  return sol;
}

Eigen::VectorXcd FieldSolution::eval_rho(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const {
  return eval_single_layer(evaluator->mesh(), z / h, zeta, points);
}

Eigen::VectorXcd FieldSolution::eval_u(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const {
  Eigen::VectorXcd out = eval_rho(points) * (h / (z * z));
  out.noalias() += eval_single_layer(evaluator->mesh(), cplx(0.0, 0.0), p,
                                     points);
  return out;
}

Eigen::VectorXcd FieldSolution::eval_v(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const {
  Eigen::VectorXcd out =
      eval_single_layer(evaluator->mesh(), cplx(0.0, 0.0), q, points);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out[i] += drive.potential(points.row(i));
  return out;
}

}  // namespace nlpbem::bem
