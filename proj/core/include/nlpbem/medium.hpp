/** \file medium.hpp
 *  \brief Drude dispersion and the permittivity <-> spectral-parameter maps.
 *
 *  The spectral parameter z satisfies z^2 = eps/(1 - eps); its branch is the
 *  principal square root followed by a sign flip whenever that lands in the
 *  lower half plane, so that passive media (Im eps > 0) always map into the
 *  open first quadrant.  The longitudinal wavenumber is k = z/h.
 */
#pragma once

#include <complex>

namespace nlpbem {

using cplx = std::complex<double>;

/// Drude damping parameters; the plasma frequency is normalized to 1.
struct DrudeParams {
  double gamma_hat = 0.0;  ///< damping rate in units of the plasma frequency
};

/// One frequency sample with all derived spectral quantities.
struct SpectralPoint {
  double omega_hat = 0.0;  ///< frequency in units of the plasma frequency
  cplx eps;                ///< permittivity at omega_hat
  cplx z;                  ///< spectral parameter, z^2 = eps/(1-eps)
  double h = 0.0;          ///< dimensionless screening length
  cplx k;                  ///< longitudinal wavenumber z/h
};

/// Drude permittivity 1 - 1/(w^2 + i*gamma*w).
/// \throws DomainError for omega_hat <= 0 or gamma_hat < 0.
cplx drude_eps(double omega_hat, const DrudeParams& params);

/// Branch-correct square root of eps/(1-eps).
/// \throws PoleError at eps = 1.
cplx z_from_eps(cplx eps);

/// Inverse map z^2/(z^2+1).
/// \throws PoleError at z = +-i.
cplx eps_from_z(cplx z);

/// Bundles drude_eps + z_from_eps + k = z/h for one frequency.
/// \throws DomainError for h <= 0 (and the drude_eps preconditions).
SpectralPoint make_spectral_point(double omega_hat, const DrudeParams& params,
                                  double h);

}  // namespace nlpbem
