/** \file nep_modal.cpp */
#include "nlpbem/nep_modal.hpp"

#include <Eigen/LU>
#include <cmath>

#include "nlpbem/bem_assemble.hpp"
#include "nlpbem/errors.hpp"

namespace nlpbem::nep {

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

Eigen::VectorXcd modal_coefficients(const Pole& pole,
                                    const Eigen::VectorXd& weights,
                                    const Eigen::VectorXcd& rhs) {
  if (!pole.simple)
    throw NonSimplePoleError(
        "modal_coefficients: pole pairing is degenerate");
  if (weights.size() != rhs.size() || pole.left.rows() != rhs.size())
    throw DomainError("modal_coefficients: size mismatch");
  // Bilinear (unconjugated) weighted pairing against each left vector.
  const Eigen::VectorXcd weighted =
      (weights.cast<cplx>().array() * rhs.array()).matrix();
  return pole.left.transpose() * weighted;
}

ModeBundle modal_data(const Pole& pole,
                      std::shared_ptr<const bem::PencilEvaluator> evaluator,
                      const bem::ExternalField& drive) {
  if (!pole.simple)
    throw NonSimplePoleError("modal_data: pole pairing is degenerate");
  const bem::TriMesh& mesh = evaluator->mesh();
  const Eigen::Index n = mesh.n();
  if (pole.right.rows() != n)
    throw DomainError("modal_data: pole does not match the mesh");
  const double h = evaluator->h();
  const cplx z = pole.z;
  const cplx k = z / h;

  ModeBundle bundle;
  bundle.pole = pole;
  bundle.evaluator = evaluator;

  // Drive projection: the pencil right-hand side is -dvn.
  Eigen::VectorXcd v_b(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v_b[i] = drive.potential(mesh.centroids.row(i));
  Eigen::PartialPivLU<Eigen::MatrixXd> luS(evaluator->S());
  const Eigen::VectorXcd Sinv_vb = solve_real(luS, v_b);
  Eigen::VectorXcd dvn = evaluator->Kstar() * Sinv_vb;
  dvn.noalias() -= 0.5 * Sinv_vb;
  bundle.coefficients = modal_coefficients(pole, mesh.areas, (-dvn).eval());

  const bem::SmoothBlocks sm = bem::assemble_smooth(mesh, k, false);
  Eigen::MatrixXd half_plus = evaluator->Kstar();
  half_plus.diagonal().array() += 0.5;
  Eigen::PartialPivLU<Eigen::MatrixXd> luH(half_plus);

  for (int dir = 0; dir < pole.degeneracy; ++dir) {
    ModeFields f;
    f.psi = pole.right.col(dir);
    f.zeta = f.psi / h;
    const cplx wz = mesh.areas.cast<cplx>().dot(f.zeta);
    f.rho_b = evaluator->S() * f.zeta;
    f.rho_b.noalias() += (k * k) * (sm.S1 * f.zeta);
    f.rho_b.array() -= (kI * k / kFourPi) * wz;
    Eigen::VectorXcd drho = evaluator->Kstar() * f.psi;
    drho.noalias() += (k * k) * (sm.K1 * f.psi);
    drho.noalias() -= 0.5 * f.psi;
    f.q = -solve_real(luH, drho);
    f.p = f.q - (h / (z * z)) * solve_real(luS, f.rho_b);
    bundle.directions.push_back(std::move(f));
  }
  return bundle;
}

Eigen::VectorXcd ModeBundle::eval_v(
    int dir, const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const {
  return bem::eval_single_layer(evaluator->mesh(), cplx(0.0, 0.0),
                                directions[static_cast<size_t>(dir)].q,
                                points);
}

Eigen::VectorXcd ModeBundle::eval_rho(
    int dir, const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const {
  return bem::eval_single_layer(evaluator->mesh(), pole.z / evaluator->h(),
                                directions[static_cast<size_t>(dir)].zeta,
                                points);
}

Eigen::VectorXcd ModeBundle::eval_u(
    int dir, const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const {
  Eigen::VectorXcd out =
      eval_rho(dir, points) * (evaluator->h() / (pole.z * pole.z));
  out.noalias() += bem::eval_single_layer(
      evaluator->mesh(), cplx(0.0, 0.0),
      directions[static_cast<size_t>(dir)].p, points);
  return out;
}

Eigen::VectorXcd modal_expansion_eval(
    const std::vector<ModeBundle>& bundles, cplx z,
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(points.rows());
  for (const auto& b : bundles) {
    const cplx dz = z - b.pole.z;
    if (std::abs(dz) < 1e-14 * std::max(1.0, std::abs(b.pole.z)))
      throw PoleError("modal_expansion_eval: z coincides with a pole");
    for (int dir = 0; dir < b.pole.degeneracy; ++dir)
      out.noalias() +=
          (b.coefficients[dir] / dz) * b.eval_v(dir, points);
  }
  return out;
}

}  // namespace nlpbem::nep
