/** \file nep_modal.hpp
 *  Residue data at simple poles: modal coefficients, per-mode boundary
 *  densities, and pole-expansion evaluation of the exterior field.
 */
#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "nlpbem/bem_pencil.hpp"
#include "nlpbem/bem_scatter.hpp"
#include "nlpbem/nep_beyn.hpp"

namespace nlpbem::nep {

/** Expansion coefficients of rhs over the pole's mode directions:
 *  c_i = <left_i, rhs> in the weighted bilinear pairing.  Requires the
 *  normalized left block of a simple pole. */
Eigen::VectorXcd modal_coefficients(const Pole& pole,
                                    const Eigen::VectorXd& weights,
                                    const Eigen::VectorXcd& rhs);

struct ModeFields {
  Eigen::VectorXcd psi;    // reduced density (right eigenvector)
  Eigen::VectorXcd zeta;   // psi / h
  Eigen::VectorXcd q;      // exterior density of the mode
  Eigen::VectorXcd p;      // interior potential density of the mode
  Eigen::VectorXcd rho_b;  // boundary trace of the mode pressure field
};

struct ModeBundle {
  Pole pole;
  std::vector<ModeFields> directions;
  Eigen::VectorXcd coefficients;  // per direction, for the given drive
  std::shared_ptr<const bem::PencilEvaluator> evaluator;

  Eigen::VectorXcd eval_v(
      int dir, const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const;
  Eigen::VectorXcd eval_u(
      int dir, const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const;
  Eigen::VectorXcd eval_rho(
      int dir, const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) const;
};

/** Builds the residue data of one simple pole under the given drive.
 *  Throws NonSimplePoleError when the pole's pairing is degenerate. */
ModeBundle modal_data(const Pole& pole,
                      std::shared_ptr<const bem::PencilEvaluator> evaluator,
                      const bem::ExternalField& drive);

/** Pole-expansion approximation of the scattered exterior potential at the
 *  given points: sum over bundles and directions of c/(z - z_pole) times
 *  the mode field.  Throws PoleError when z coincides with a pole. */
Eigen::VectorXcd modal_expansion_eval(
    const std::vector<ModeBundle>& bundles, cplx z,
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points);

}  // namespace nlpbem::nep
