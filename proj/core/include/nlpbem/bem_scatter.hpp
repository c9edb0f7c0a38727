/** \file bem_scatter.hpp
 *  Full scattering solve on a TriMesh: densities, induced dipole moment,
 *  and off-surface field evaluation.
 */
#pragma once

#include <Eigen/Core>
#include <memory>

#include "nlpbem/bem_pencil.hpp"
#include "nlpbem/mesh.hpp"

namespace nlpbem::bem {

struct ExternalField {
  enum class Kind { UniformZ, Dipole };
  Kind kind = Kind::UniformZ;
  double d = 0.0;  // dipole standoff above the north pole (Dipole only)

  static ExternalField uniform_z() { return {Kind::UniformZ, 0.0}; }
  static ExternalField dipole(double standoff) {
    return {Kind::Dipole, standoff};
  }
  double potential(const Eigen::RowVector3d& x) const;
};

struct FieldSolution {
  cplx z;
  double h = 0.0;
  ExternalField drive;

  Eigen::VectorXcd psi;    // reduced interior density
  Eigen::VectorXcd zeta;   // interior Helmholtz layer density (psi / h)
  Eigen::VectorXcd q;      // exterior layer density
  Eigen::VectorXcd p;      // interior potential layer density
  Eigen::VectorXcd rho_b;  // boundary trace of the pressure-like field
  Eigen::VectorXcd dvn;    // interior normal derivative of the external part

  double condition_estimate = 0.0;  // 1 / rcond of the reduced pencil
  cplx dipole_moment;               // induced moment along the drive axis

  Eigen::VectorXcd eval_rho(
      const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const;
  Eigen::VectorXcd eval_u(
      const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const;
  /** Exterior potential including the driving term. */
  Eigen::VectorXcd eval_v(
      const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const;

  std::shared_ptr<const PencilEvaluator> evaluator;
};

/** Solves the transmission problem at spectral parameter z.  Throws
 *  NearResonanceError (carrying the condition estimate) when the reduced
 *  pencil is numerically singular at z. */
FieldSolution solve_scattering(std::shared_ptr<const PencilEvaluator> ev,
                               cplx z, const ExternalField& field);

}  // namespace nlpbem::bem
