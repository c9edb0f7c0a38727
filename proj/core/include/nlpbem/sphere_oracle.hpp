/** \file sphere_oracle.hpp
 *  \brief Exact analytic solution machinery on the unit sphere: diagonal
 *         operator symbols per spherical-harmonic degree, the dispersion
 *         function and its roots, the first-order root-shift formula, and the
 *         observable spectra (absorption, near field) built from them.
 *
 *  Conventions: plasma frequency normalized to 1; unit sphere radius; the
 *  spectral parameter z obeys z^2 = eps/(1-eps) and the longitudinal
 *  wavenumber is k = z/h.  Surface modes live on the positive imaginary
 *  z-axis (eps < 0), bulk modes on the positive real z-axis (eps in (0,1)).
 */
#pragma once

#include <string>
#include <vector>

#include "nlpbem/medium.hpp"
#include "nlpbem/sweep.hpp"

namespace nlpbem::sphere {

/// Diagonal symbols of the four boundary operators at one harmonic degree.
struct SphereSymbols {
  double s = 0.0;          ///< static single layer: -1/(2l+1)
  double kstar = 0.0;      ///< static adjoint double layer: 1/(2(2l+1))
  cplx sk;                 ///< Helmholtz single layer: -i k h_l(k) j_l(k)
  cplx half_kk;            ///< (-1/2 I + K^{*,k}): -i k^2 h_l(k) j_l'(k)
  bool dynamic_valid = false;  ///< false at k = 0 (sk, half_kk undefined)
};

enum class RootKind { Surface, Bulk };

/// One root of the degree-l dispersion function at screening length h.
struct DispersionRoot {
  int ell = 0;
  cplx z_root;
  cplx eps_root;
  RootKind kind = RootKind::Surface;
  double h = 0.0;
};

/// Window of admissible permittivities for returned dispersion roots.
struct EpsWindow {
  double lo = -1e6;
  double hi = 1.0 - 1e-3;
};

/// One row of the resonance tables: sequential mode index (degeneracy
/// expanded), harmonic degree, and permittivity.
struct SpectrumEntry {
  int index = 0;
  int ell = 0;
  double eps = 0.0;
};

/// All four operator symbols at degree l and wavenumber k.
SphereSymbols sphere_symbols(int ell, cplx k);

/// Dispersion function
///   lambda_l(z) = i k h_l(k) [ -k (z^2 + c1) j_l'(k) + c2 j_l(k) ],
/// k = z/h, c1 = (l+1)/(2l+1), c2 = l(l+1)/(2l+1); evaluated through scaled
/// Bessel products so it stays finite far up the imaginary axis.
cplx lambda_ell(int ell, cplx z, double h);

/// Analytic z-derivative of lambda_ell.
cplx lambda_ell_dz(int ell, cplx z, double h);

/// Magnitude scale of lambda_ell at z (sum of the magnitudes of its two
/// additive terms); used for relative root residuals.
double lambda_ell_scale(int ell, cplx z, double h);

/// Local (h -> 0) surface resonance permittivity -(l+1)/l.
double local_eigenvalue(int ell);

/// All dispersion roots of degree l: at most one surface root on the
/// positive imaginary axis plus up to max_bulk bulk roots on the positive
/// real axis, each polished to |lambda| below 1e-12 of its local scale and
/// filtered to eps inside the window.
std::vector<DispersionRoot> dispersion_roots(int ell, double h,
                                             EpsWindow window = {},
                                             int max_bulk = 8);

/// Surface-spectrum table at screening length h: for each l <= lmax with a
/// negative-eps surface root, that eps repeated 2l+1 times, indexed
/// sequentially in ascending l.
std::vector<SpectrumEntry> eigenvalue_table(double h, int lmax);

/// Local counterpart: -(l+1)/l for every l <= lmax, degeneracy expanded.
std::vector<SpectrumEntry> local_eigenvalue_table(int lmax);

/// First-order nonlocal shift of the degree-l surface permittivity:
///   eps_loc + h (2l+1) sqrt(eps_loc (eps_loc - 1)).
double perturbation_shift(int ell, double h);

/// Per-mode multiplier mapping the degree-l harmonic coefficient of the
/// excitation's normal derivative to the r^{-(l+1)} scattered coefficient:
///   (k j_l' - l j_l) / ( -k (z^2 (2l+1) + l + 1) j_l' + l(l+1) j_l ).
cplx scattered_coefficient(int ell, cplx z, double h);

/// h -> 0 limit of scattered_coefficient: (eps-1)/(l eps + l + 1).
cplx scattered_coefficient_local(int ell, cplx eps);

/// Absorption spectrum omega * Im(mu) of a unit sphere in the uniform field
/// v_ext = x3, where mu is the dipole scattered coefficient at degree 1.
SweepTable absorption_spectrum(double h, const DrudeParams& params,
                               const std::vector<double>& omega_grid);

/// Same observable with the local (h = 0) dipole coefficient.
SweepTable absorption_spectrum_local(const DrudeParams& params,
                                     const std::vector<double>& omega_grid);

/// Near-field sweep result; `truncated` flags a harmonic tail estimated
/// above 1e-8 of the partial sum at the configured lmax.
struct NearFieldResult {
  SweepTable table;
  bool truncated = false;
  double worst_tail_fraction = 0.0;
};

/// |d(v - v_ext)/dr| at the location of a unit radial point dipole placed at
/// distance d above the north pole, summed over degrees 1..lmax.
NearFieldResult near_field_response(double d, double h,
                                    const DrudeParams& params,
                                    const std::vector<double>& omega_grid,
                                    int lmax);

/// Local-model counterpart of near_field_response.
NearFieldResult near_field_response_local(double d, const DrudeParams& params,
                                          const std::vector<double>& omega_grid,
                                          int lmax);

/// One row of the small-h operator-asymptotics residual sweep.
struct AsymptoticResidual {
  double h = 0.0;
  double err_S = 0.0;  ///< |sk + ih/(2z)| relative to h/(2|z|)
  double err_K = 0.0;  ///< |half_kk + 1/2|
};

/// Residuals of the leading small-h asymptotics of the dynamic symbols along
/// a decreasing h sequence, for Im z > 0.
std::vector<AsymptoticResidual> asymptotic_residual(
    int ell, cplx z, const std::vector<double>& h_seq);

}  // namespace nlpbem::sphere
