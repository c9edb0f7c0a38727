/** \file specfun.hpp
 *  \brief Complex-argument spherical special functions with overflow-safe
 *         scaled evaluation.
 *
 *  Provides spherical Bessel j_l, spherical Hankel h_l^{(1)} (values and
 *  derivatives), the exponential-scale-cancelling products h_l*j_l and
 *  h_l*j_l', and real orthonormal spherical harmonics.
 *
 *  Scaling convention: a "scaled" result stores an O(1) value together with
 *  a real natural-log factor, true value = stored * exp(scale_log).  For
 *  j_l the analytic part of the factor is |Im x| (j grows like e^{|Im x|});
 *  for h_l^{(1)} it is -Im x (h decays like e^{-Im x}).  In the products the
 *  two factors cancel for Im k >= 0, which is what keeps the pencil symbols
 *  finite for arguments as large as k = 1e5 i.
 */
#pragma once

#include <complex>

namespace nlpbem::specfun {

using cplx = std::complex<double>;

/// j_l(x) and its derivative; true value = stored * exp(scale_log).
/// Unscaled results always have scale_log == 0.
struct SphBesselPair {
  cplx j;
  cplx jp;
  double scale_log = 0.0;
};

/// h_l^{(1)}(x) and its derivative; same scaling convention.
struct SphHankelPair {
  cplx h;
  cplx hp;
  double scale_log = 0.0;
};

/// The two products the sphere symbols are built from (exactly representable
/// in doubles whenever Im k >= 0): hj = h_l(k) j_l(k), hjp = h_l(k) j_l'(k).
struct JHProducts {
  cplx hj;
  cplx hjp;
};

/// All four first-derivative products, for analytic differentiation of the
/// pencil symbol: hj = h j, hjp = h j', hpj = h' j, hpjp = h' j'.
struct JHCrossProducts {
  cplx hj;
  cplx hjp;
  cplx hpj;
  cplx hpjp;
};

/// Spherical Bessel function of the first kind and derivative.
/// Uses downward (Miller) recurrence for |x| < l + 10 and stable upward
/// recurrence in the oscillatory regime |x| >= l + 10.
/// Throws DomainError for non-finite x, |x| > 2e5, or (unless scaled)
/// |Im x| > 600 where the unscaled value overflows.
SphBesselPair sph_bessel_j(int ell, cplx x, bool scaled = false);

/// Spherical Hankel function of the first kind and derivative, by upward
/// recurrence from the closed-form h_0, h_1.
/// Throws SingularityError at x = 0; DomainError as for sph_bessel_j.
SphHankelPair sph_hankel1(int ell, cplx x, bool scaled = false);

/// h_l(k) j_l(k) and h_l(k) j_l'(k) with mutual cancellation of the
/// exponential scales.  Finite for all k with Im k >= -300 in the admitted
/// range |k| <= 2e5.  Throws SingularityError at k = 0.
JHProducts scaled_jh_products(int ell, cplx k);

/// As scaled_jh_products but also h_l'(k) j_l(k) and h_l'(k) j_l'(k).
JHCrossProducts jh_cross_products(int ell, cplx k);

/// Real orthonormal spherical harmonic Y_{l,m}(theta, phi) on the unit
/// sphere: m = 0 zonal, m > 0 the sqrt(2) cos(m phi) branch, m < 0 the
/// sqrt(2) sin(|m| phi) branch (Condon-Shortley phase included).
/// Throws DomainError for |m| > l.
double real_sph_harm(int ell, int m, double theta, double phi);

}  // namespace nlpbem::specfun
