/** \file sphere_oracle.cpp */
#include "nlpbem/sphere_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlpbem/errors.hpp"
#include "nlpbem/specfun.hpp"

namespace nlpbem::sphere {

namespace {

using specfun::JHCrossProducts;
using specfun::jh_cross_products;

constexpr cplx kI{0.0, 1.0};

double c1_of(int ell) { return (ell + 1.0) / (2.0 * ell + 1.0); }
double c2_of(int ell) { return ell * (ell + 1.0) / (2.0 * ell + 1.0); }

void check_lambda_args(int ell, cplx z, double h, const char* who) {
  if (ell < 0) throw DomainError(std::string(who) + ": negative degree");
  if (!(h > 0.0)) throw DomainError(std::string(who) + ": h must be positive");
  if (z == cplx(0.0, 0.0))
    throw SingularityError(std::string(who) + ": z = 0 degenerates the pencil");
}

// Both additive terms of lambda_ell, so callers can form the value and its
// magnitude scale consistently.
void lambda_terms(int ell, cplx z, double h, cplx& term_jp, cplx& term_j) {
  const cplx k = z / h;
  const JHCrossProducts c = jh_cross_products(ell, k);
  term_jp = -kI * (z * z + c1_of(ell)) * k * k * c.hjp;
  term_j = kI * c2_of(ell) * k * c.hj;
}

// Real-valued restriction of lambda_ell to the positive imaginary z-axis
// (exact symmetry; the imaginary residue is roundoff).
double lambda_imag_axis(int ell, double t, double h) {
  cplx a, b;
  lambda_terms(ell, cplx(0.0, t), h, a, b);
  return (a + b).real();
}

// Real dispersion bracket on the positive real z-axis.  lambda itself is a
// nonvanishing complex prefactor i k h_l(k) times this function, so its
// zeros on the axis are exactly the bracket's sign changes.
double bulk_bracket(int ell, double t, double h) {
  const double k = t / h;
  const specfun::SphBesselPair jp = specfun::sph_bessel_j(ell, cplx(k, 0.0));
  return -k * (t * t + c1_of(ell)) * jp.jp.real() +
         c2_of(ell) * jp.j.real();
}

// Bisection to machine width on a bracketed sign change.
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  (void)fb;
  return 0.5 * (a + b);
}

cplx eps_of_imag_root(double t) {
  // z = i t  =>  z^2 = -t^2  =>  eps = -t^2 / (1 - t^2)
  return cplx(-t * t / (1.0 - t * t), 0.0);
}

cplx eps_of_real_root(double t) {
  // z = t  =>  eps = t^2 / (1 + t^2)
  return cplx(t * t / (1.0 + t * t), 0.0);
}

// Locates the (at most one) surface root on z = i t, t > 0.  Returns true
// with the root abscissa when a bracketed sign change is found.
bool find_surface_root(int ell, double h, double& t_root) {
  const double t_loc = std::sqrt(c1_of(ell));
  auto f = [&](double t) { return lambda_imag_axis(ell, t, h); };

  std::vector<double> grid;
  grid.reserve(560);
  // Logarithmic sweep below the local anchor: catches roots migrating
  // toward t = 0 as nonlocality pushes the mode out of existence.
  const double lo = 1e-5 * t_loc, mid = 0.5 * t_loc;
  const int n_log = 140;
  for (int i = 0; i < n_log; ++i)
    grid.push_back(lo * std::pow(mid / lo, i / double(n_log)));
  // Linear sweep across and above the anchor.
  const double hi = 10.0 * t_loc;
  const int n_lin = 400;
  for (int i = 0; i <= n_lin; ++i)
    grid.push_back(mid + (hi - mid) * i / double(n_lin));

  bool found = false;
  double prev_t = grid[0];
  double prev_f = f(prev_t);
  for (size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    const double ft = f(t);
    if ((prev_f < 0.0) != (ft < 0.0) || ft == 0.0) {
      // Keep the largest-t crossing: it is the h->0 continuation of the
      // local mode; earlier crossings would be scan artifacts.
      t_root = bisect(f, prev_t, t, prev_f, ft);
      found = true;
    }
    prev_t = t;
    prev_f = ft;
  }
  return found;
}

}  // namespace

SphereSymbols sphere_symbols(int ell, cplx k) {
  if (ell < 0) throw DomainError("sphere_symbols: negative degree");
  SphereSymbols out;
  out.s = -1.0 / (2.0 * ell + 1.0);
  out.kstar = 1.0 / (2.0 * (2.0 * ell + 1.0));
  if (k == cplx(0.0, 0.0)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.sk = cplx(nan, nan);
    out.half_kk = cplx(nan, nan);
    out.dynamic_valid = false;
    return out;
  }
  const JHCrossProducts c = jh_cross_products(ell, k);
  out.sk = -kI * k * c.hj;
  out.half_kk = -kI * k * k * c.hjp;
  out.dynamic_valid = true;
  return out;
}

cplx lambda_ell(int ell, cplx z, double h) {
  check_lambda_args(ell, z, h, "lambda_ell");
  cplx a, b;
  lambda_terms(ell, z, h, a, b);
  return a + b;
}

double lambda_ell_scale(int ell, cplx z, double h) {
  check_lambda_args(ell, z, h, "lambda_ell_scale");
  cplx a, b;
  lambda_terms(ell, z, h, a, b);
  return std::abs(a) + std::abs(b);
}

cplx lambda_ell_dz(int ell, cplx z, double h) {
  check_lambda_args(ell, z, h, "lambda_ell_dz");
  const double c1 = c1_of(ell), c2 = c2_of(ell);
  const cplx k = z / h;
  const JHCrossProducts c = jh_cross_products(ell, k);
  // With P(k) = k^2 h_l j_l' and Q(k) = k h_l j_l:
  //   lambda = -i (z^2+c1) P(z/h) + i c2 Q(z/h)
  //   P'(k)  = k^2 (h_l' j_l') - (k^2 - l(l+1)) (h_l j_l)   [Bessel ODE]
  //   Q'(k)  = h_l j_l + k (h_l' j_l + h_l j_l')
  const cplx P = k * k * c.hjp;
  const cplx Pp = k * k * c.hpjp -
                  (k * k - cplx(ell * (ell + 1.0), 0.0)) * c.hj;
  const cplx Qp = c.hj + k * (c.hpj + c.hjp);
  return -2.0 * kI * z * P +
         (-kI * (z * z + c1) * Pp + kI * c2 * Qp) / h;
}

double local_eigenvalue(int ell) {
  if (ell < 1)
    throw DomainError(
        "local_eigenvalue: the constant mode carries no resonance");
  return -(ell + 1.0) / ell;
}

std::vector<DispersionRoot> dispersion_roots(int ell, double h,
                                             EpsWindow window, int max_bulk) {
  if (ell < 1) throw DomainError("dispersion_roots: degree must be >= 1");
  if (!(h > 0.0)) throw DomainError("dispersion_roots: h must be positive");
  std::vector<DispersionRoot> out;

  double t_surf = 0.0;
  if (find_surface_root(ell, h, t_surf) && t_surf < 1.0) {
    DispersionRoot r;
    r.ell = ell;
    r.z_root = cplx(0.0, t_surf);
    r.eps_root = eps_of_imag_root(t_surf);
    r.kind = RootKind::Surface;
    r.h = h;
    if (r.eps_root.real() >= window.lo && r.eps_root.real() <= window.hi)
      out.push_back(r);
  }

  if (max_bulk > 0) {
    // eps = t^2/(1+t^2) < window.hi bounds the scan range.
    const double hi = std::min(window.hi, 1.0 - 1e-9);
    if (hi > 0.0) {
      const double t_max = std::sqrt(hi / (1.0 - hi));
      const double step = M_PI * h / 4.0;  // >= 8 samples per j_l oscillation
      auto g = [&](double t) { return bulk_bracket(ell, t, h); };
      int found = 0;
      double prev_t = step * 0.5;
      double prev_g = g(prev_t);
      for (double t = prev_t + step; t <= t_max && found < max_bulk;
           t += step) {
        const double gt = g(t);
        if ((prev_g < 0.0) != (gt < 0.0) || gt == 0.0) {
          const double t_root = bisect(g, prev_t, t, prev_g, gt);
          DispersionRoot r;
          r.ell = ell;
          r.z_root = cplx(t_root, 0.0);
          r.eps_root = eps_of_real_root(t_root);
          r.kind = RootKind::Bulk;
          r.h = h;
          if (r.eps_root.real() >= window.lo &&
              r.eps_root.real() <= window.hi) {
            out.push_back(r);
            ++found;
          }
        }
        prev_t = t;
        prev_g = gt;
      }
    }
  }
  return out;
}

std::vector<SpectrumEntry> eigenvalue_table(double h, int lmax) {
  if (lmax < 1) throw DomainError("eigenvalue_table: lmax must be >= 1");
  std::vector<SpectrumEntry> out;
  int index = 1;
  for (int ell = 1; ell <= lmax; ++ell) {
    const auto roots = dispersion_roots(ell, h, EpsWindow{-1e9, 0.0}, 0);
    for (const auto& r : roots) {
      if (r.kind != RootKind::Surface || r.eps_root.real() >= 0.0) continue;
      for (int m = 0; m < 2 * ell + 1; ++m) {
        out.push_back({index++, ell, r.eps_root.real()});
      }
    }
  }
  return out;
}

std::vector<SpectrumEntry> local_eigenvalue_table(int lmax) {
  if (lmax < 1) throw DomainError("local_eigenvalue_table: lmax must be >= 1");
  std::vector<SpectrumEntry> out;
  int index = 1;
  for (int ell = 1; ell <= lmax; ++ell) {
    const double eps = local_eigenvalue(ell);
    for (int m = 0; m < 2 * ell + 1; ++m) out.push_back({index++, ell, eps});
  }
  return out;
}

double perturbation_shift(int ell, double h) {
  if (ell < 1) throw DomainError("perturbation_shift: degree must be >= 1");
  if (h < 0.0) throw DomainError("perturbation_shift: h must be >= 0");
  const double el = local_eigenvalue(ell);
  return el + h * (2.0 * ell + 1.0) * std::sqrt(el * (el - 1.0));
}

cplx scattered_coefficient(int ell, cplx z, double h) {
  if (ell < 1) throw DomainError("scattered_coefficient: degree must be >= 1");
  check_lambda_args(ell, z, h, "scattered_coefficient");
  const cplx k = z / h;
  // Numerator and denominator share the Bessel scale, so the scaled pair can
  // be used directly: the common exponential cancels in the ratio.
  const specfun::SphBesselPair J = specfun::sph_bessel_j(ell, k, true);
  const cplx num = k * J.jp - double(ell) * J.j;
  const cplx den = -k * (z * z * (2.0 * ell + 1.0) + (ell + 1.0)) * J.jp +
                   double(ell) * (ell + 1.0) * J.j;
  const double den_scale =
      std::abs(k * (z * z * (2.0 * ell + 1.0) + (ell + 1.0)) * J.jp) +
      std::abs(double(ell) * (ell + 1.0) * J.j);
  if (std::abs(den) < 1e-14 * den_scale)
    throw OnResonanceError("scattered_coefficient: evaluation at a dispersion root");
  return num / den;
}

cplx scattered_coefficient_local(int ell, cplx eps) {
  if (ell < 1)
    throw DomainError("scattered_coefficient_local: degree must be >= 1");
  const cplx den = double(ell) * eps + double(ell) + 1.0;
  if (std::abs(den) < 1e-14 * (std::abs(double(ell) * eps) + ell + 1.0))
    throw OnResonanceError(
        "scattered_coefficient_local: evaluation at the local resonance");
  return (eps - 1.0) / den;
}

namespace {

SweepTable absorption_table(const DrudeParams& params,
                            const std::vector<double>& omega_grid,
                            double h, bool local) {
  SweepTable table;
  table.columns = {"omega_hat", "absorption"};
  for (double w : omega_grid) {
    const cplx eps = drude_eps(w, params);
    cplx mu;
    if (local) {
      mu = scattered_coefficient_local(1, eps);
    } else {
      const cplx z = z_from_eps(eps);
      mu = scattered_coefficient(1, z, h);
    }
    table.add_row(w, {w * mu.imag()});
  }
  return table;
}

NearFieldResult near_field_table(double d, double h, const DrudeParams& params,
                                 const std::vector<double>& omega_grid,
                                 int lmax, bool local) {
  if (!(d > 0.0)) throw DomainError("near_field_response: d must be positive");
  if (lmax < 1) throw DomainError("near_field_response: lmax must be >= 1");
  const double R = 1.0 + d;
  NearFieldResult res;
  res.table.columns = {"omega_hat", "response"};
  // Degree-l geometric factor: the drive projection contributes l(l+1),
  // the scattered-field radial derivative another (l+1), over R^{2l+4}.
  std::vector<double> geom(static_cast<size_t>(lmax) + 1, 0.0);
  for (int ell = 1; ell <= lmax; ++ell)
    geom[ell] = ell * (ell + 1.0) * (ell + 1.0) /
                (4.0 * M_PI * std::pow(R, 2.0 * ell + 4.0));
  const double rho = 1.0 / (R * R);

  for (double w : omega_grid) {
    const cplx eps = drude_eps(w, params);
    cplx z;
    if (!local) z = z_from_eps(eps);
    cplx sum = 0.0;
    cplx last_term = 0.0;
    for (int ell = 1; ell <= lmax; ++ell) {
      const cplx ratio = local ? scattered_coefficient_local(ell, eps)
                               : scattered_coefficient(ell, z, h);
      last_term = ratio * geom[ell];
      sum += last_term;
    }
    const double rho_eff = rho * (lmax + 2.0) * (lmax + 2.0) /
                           (lmax * (lmax + 1.0));
    const double tail = (rho_eff < 1.0)
                            ? std::abs(last_term) * rho_eff / (1.0 - rho_eff)
                            : std::numeric_limits<double>::infinity();
    const double frac = (std::abs(sum) > 0.0) ? tail / std::abs(sum) : 0.0;
    if (frac > res.worst_tail_fraction) res.worst_tail_fraction = frac;
    res.table.add_row(w, {std::abs(sum)});
  }
  res.truncated = res.worst_tail_fraction > 1e-8;
  return res;
}

}  // namespace

SweepTable absorption_spectrum(double h, const DrudeParams& params,
                               const std::vector<double>& omega_grid) {
  if (!(h > 0.0)) throw DomainError("absorption_spectrum: h must be positive");
  return absorption_table(params, omega_grid, h, /*local=*/false);
}

SweepTable absorption_spectrum_local(const DrudeParams& params,
                                     const std::vector<double>& omega_grid) {
  return absorption_table(params, omega_grid, 0.0, /*local=*/true);
}

NearFieldResult near_field_response(double d, double h,
                                    const DrudeParams& params,
                                    const std::vector<double>& omega_grid,
                                    int lmax) {
  if (!(h > 0.0)) throw DomainError("near_field_response: h must be positive");
  return near_field_table(d, h, params, omega_grid, lmax, /*local=*/false);
}

NearFieldResult near_field_response_local(double d, const DrudeParams& params,
                                          const std::vector<double>& omega_grid,
                                          int lmax) {
  return near_field_table(d, 0.0, params, omega_grid, lmax, /*local=*/true);
}

std::vector<AsymptoticResidual> asymptotic_residual(
    int ell, cplx z, const std::vector<double>& h_seq) {
  if (ell < 0) throw DomainError("asymptotic_residual: negative degree");
  if (!(z.imag() > 0.0))
    throw HypothesisError(
        "asymptotic_residual: requires Im z > 0 for the decay asymptotics");
  std::vector<AsymptoticResidual> out;
  double prev_h = std::numeric_limits<double>::infinity();
  for (double h : h_seq) {
    if (!(h > 0.0) || h >= prev_h)
      throw DomainError(
          "asymptotic_residual: h sequence must be positive decreasing");
    prev_h = h;
    const SphereSymbols sym = sphere_symbols(ell, z / h);
    AsymptoticResidual r;
    r.h = h;
    r.err_S = std::abs(sym.sk + kI * h / (2.0 * z)) / (h / (2.0 * std::abs(z)));
    r.err_K = std::abs(sym.half_kk + 0.5);
    out.push_back(r);
  }
  return out;
}

}  // namespace nlpbem::sphere
