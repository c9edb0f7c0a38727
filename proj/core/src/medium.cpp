/** \file medium.cpp */
#include "nlpbem/medium.hpp"

#include <cmath>

#include "nlpbem/errors.hpp"

namespace nlpbem {

cplx drude_eps(double omega_hat, const DrudeParams& params) {
  if (!(omega_hat > 0.0))
    throw DomainError("drude_eps: omega_hat must be positive");
  if (params.gamma_hat < 0.0)
    throw DomainError("drude_eps: gamma_hat must be non-negative");
  const cplx denom(omega_hat * omega_hat, params.gamma_hat * omega_hat);
  return 1.0 - 1.0 / denom;
}

cplx z_from_eps(cplx eps) {
  if (eps == cplx(1.0, 0.0))
    throw PoleError("z_from_eps: eps = 1 is a pole of eps/(1-eps)");
  const cplx z2 = eps / (1.0 - eps);
  cplx z = std::sqrt(z2);  // principal branch, Re z >= 0
  if (z.imag() < 0.0) z = -z;
  return z;
}

cplx eps_from_z(cplx z) {
  const cplx z2 = z * z;
  if (z2 + 1.0 == cplx(0.0, 0.0))
    throw PoleError("eps_from_z: z = +-i is a pole of z^2/(z^2+1)");
  return z2 / (z2 + 1.0);
}

SpectralPoint make_spectral_point(double omega_hat, const DrudeParams& params,
                                  double h) {
  if (!(h > 0.0)) throw DomainError("make_spectral_point: h must be positive");
  SpectralPoint pt;
  pt.omega_hat = omega_hat;
  pt.h = h;
  pt.eps = drude_eps(omega_hat, params);
  pt.z = z_from_eps(pt.eps);
  pt.k = pt.z / h;
  return pt;
}

}  // namespace nlpbem
