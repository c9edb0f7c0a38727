/** \file bem_assemble.hpp
 *  Dense collocation assembly of the boundary operators on a TriMesh.
 *
 *  Kernel conventions (r = |x - y|, nu_x = outward unit normal at the
 *  collocation point):
 *    single layer      :  -exp(ikr) / (4 pi r)
 *    normal derivative :  exp(ikr) (1 - ikr) nu_x.(x-y) / (4 pi r^3)
 *  The k-dependent operators split into the static part, a rank-one piece,
 *  and smooth remainders:
 *    Sk  = S  - (ik/4pi) ones * areas^T + k^2 S1
 *    K*k = K* + k^2 K1
 *  with S1, K1 (and their k-derivatives dS1, dK1) having bounded kernels.
 */
#pragma once

#include <Eigen/Core>
#include <complex>

#include "nlpbem/mesh.hpp"

namespace nlpbem::bem {

using cplx = std::complex<double>;

struct StaticOperators {
  Eigen::MatrixXd S;
  Eigen::MatrixXd Kstar;
};

struct SmoothBlocks {
  Eigen::MatrixXcd S1, K1;
  Eigen::MatrixXcd dS1, dK1;  // empty unless requested
};

struct HelmholtzOperators {
  Eigen::MatrixXcd Sk, Kstar_k;
};

StaticOperators assemble_static(const TriMesh& mesh);
SmoothBlocks assemble_smooth(const TriMesh& mesh, cplx k,
                             bool with_derivatives);
HelmholtzOperators assemble_helmholtz(const TriMesh& mesh, cplx k);

/** Single-layer potential with wavenumber k (k = 0 gives the static layer)
 *  of an elementwise-constant density, evaluated at off-surface points. */
Eigen::VectorXcd eval_single_layer(
    const TriMesh& mesh, cplx k, const Eigen::VectorXcd& density,
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& points);

}  // namespace nlpbem::bem
