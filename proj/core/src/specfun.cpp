/** \file specfun.cpp
 *  \brief Spherical Bessel/Hankel machinery with explicit scale bookkeeping.
 */
#include "nlpbem/specfun.hpp"

#include <cmath>
#include <limits>

#include "nlpbem/errors.hpp"

namespace nlpbem::specfun {
namespace {

// Magnitude at which in-recurrence values are renormalized, and its log.
constexpr double kRescale = 1e250;
constexpr double kRescaleLog = 575.64627324851142;  // ln(1e250)

// Largest |Im x| for which unscaled values fit in a double (e^600 < 1e261).
constexpr double kUnscaledImLimit = 600.0;
constexpr double kArgLimit = 2e5;

cplx unit_phase(double t) { return {std::cos(t), std::sin(t)}; }

// sin(x) e^{-|Im x|} and cos(x) e^{-|Im x|} without overflow: both
// e^{ix}e^{-|Im x|} and e^{-ix}e^{-|Im x|} have non-positive real exponent.
void scaled_sin_cos(cplx x, cplx& sin_s, cplx& cos_s) {
  const double re = x.real(), im = x.imag();
  const double s = std::abs(im);
  const cplx ep = unit_phase(re) * std::exp(-im - s);   // e^{ix} e^{-s}
  const cplx em = unit_phase(-re) * std::exp(im - s);   // e^{-ix} e^{-s}
  sin_s = (ep - em) / cplx(0.0, 2.0);
  cos_s = 0.5 * (ep + em);
}

void check_argument(cplx x, bool scaled, const char* who) {
  if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
    throw DomainError(std::string(who) + ": non-finite argument");
  if (std::abs(x) > kArgLimit)
    throw DomainError(std::string(who) + ": |x| exceeds supported range 2e5");
  if (!scaled && std::abs(x.imag()) > kUnscaledImLimit)
    throw DomainError(std::string(who) +
                      ": |Im x| > 600 overflows the unscaled path; "
                      "request scaled output");
}

// Applies val * exp(slog) without overflowing the intermediate exponential
// when the final result is representable.
cplx apply_scale(cplx val, double slog) {
  if (std::abs(slog) <= 600.0) return val * std::exp(slog);
  const double half = 0.5 * slog;
  return val * std::exp(half) * std::exp(half);
}

// Scaled j_{l}, j_{l-1} on a common scale: true value = stored*exp(scale_log).
struct ScaledJ {
  cplx jl, jlm1;
  double scale_log;
};

// Stable upward recurrence, valid in the oscillatory regime |x| >= l + 10.
ScaledJ bessel_j_upward(int ell, cplx x) {
  cplx sin_s, cos_s;
  scaled_sin_cos(x, sin_s, cos_s);
  double slog = std::abs(x.imag());
  cplx jm = cos_s / x;                       // j_{-1}
  cplx jc = sin_s / x;                       // j_0
  for (int n = 0; n < ell; ++n) {
    const cplx jn = (2.0 * n + 1.0) / x * jc - jm;
    jm = jc;
    jc = jn;
    if (std::abs(jc.real()) > kRescale || std::abs(jc.imag()) > kRescale) {
      jm /= kRescale;
      jc /= kRescale;
      slog += kRescaleLog;
    }
  }
  return {jc, jm, slog};
}

// Downward (Miller) recurrence with renormalization against j_0; required
// below the turning point where upward recurrence is unstable.
ScaledJ bessel_j_miller(int ell, cplx x) {
  const int lstart =
      ell + std::max(20, static_cast<int>(std::ceil(std::abs(x))));
  cplx fp = 0.0;  // f_{n+1}
  cplx fc = 1.0;  // f_n
  long bc = 0;    // rescale count so far
  cplx f_l = 0.0, f_lm1 = 0.0;
  long b_l = 0, b_lm1 = 0;
  for (int n = lstart; n >= 0; --n) {
    if (n == ell) {
      f_l = fc;
      b_l = bc;
    }
    if (n == ell - 1) {
      f_lm1 = fc;
      b_lm1 = bc;
    }
    if (n == 0) break;
    const cplx fm = (2.0 * n + 1.0) / x * fc - fp;
    fp = fc;
    fc = fm;
    if (std::abs(fc.real()) > kRescale || std::abs(fc.imag()) > kRescale) {
      fp /= kRescale;
      fc /= kRescale;
      ++bc;
    }
  }
  const cplx f0 = fc;
  const long b0 = bc;

  cplx sin_s, cos_s;
  scaled_sin_cos(x, sin_s, cos_s);
  const cplx j0s = sin_s / x;  // scaled j_0, scale |Im x|
  const double s0 = std::abs(x.imag());

  ScaledJ out;
  out.scale_log = s0 + static_cast<double>(b_l - b0) * kRescaleLog;
  out.jl = (f_l / f0) * j0s;
  if (ell >= 1) {
    // Bring f_{l-1} onto the scale of f_l; at most one rescale separates
    // consecutive indices, so the correction factor is kRescale^{0 or 1}.
    cplx v = (f_lm1 / f0) * j0s;
    for (long b = 0; b < b_lm1 - b_l; ++b) v *= kRescale;
    out.jlm1 = v;
  } else {
    out.jlm1 = (cos_s / x) * std::exp(s0 - out.scale_log);  // j_{-1} rescaled
  }
  return out;
}

}  // namespace

SphBesselPair sph_bessel_j(int ell, cplx x, bool scaled) {
  if (ell < 0) throw DomainError("sph_bessel_j: negative order");
  check_argument(x, scaled, "sph_bessel_j");
  if (x == cplx(0.0, 0.0)) {
    SphBesselPair out;
    out.j = (ell == 0) ? 1.0 : 0.0;
    out.jp = (ell == 1) ? 1.0 / 3.0 : 0.0;
    return out;
  }
  const ScaledJ sj = (std::abs(x) >= ell + 10.0) ? bessel_j_upward(ell, x)
                                                 : bessel_j_miller(ell, x);
  SphBesselPair out;
  out.j = sj.jl;
  out.jp = sj.jlm1 - (ell + 1.0) / x * sj.jl;  // j_l' = j_{l-1} - (l+1)/x j_l
  out.scale_log = sj.scale_log;
  if (!scaled) {
    out.j = apply_scale(out.j, out.scale_log);
    out.jp = apply_scale(out.jp, out.scale_log);
    out.scale_log = 0.0;
  }
  return out;
}

SphHankelPair sph_hankel1(int ell, cplx x, bool scaled) {
  if (ell < 0) throw DomainError("sph_hankel1: negative order");
  if (x == cplx(0.0, 0.0))
    throw SingularityError("sph_hankel1: evaluation at x = 0");
  check_argument(x, scaled, "sph_hankel1");

  // Scaled seeds: stored = h * e^{-scale_log}, scale_log = -Im x, so the
  // stored values carry only the unit phase e^{i Re x}.
  const cplx phase = unit_phase(x.real());
  double slog = -x.imag();
  cplx hm = phase / x;                         // h_{-1} = e^{ix}/x
  cplx hc = cplx(0.0, -1.0) * phase / x;       // h_0 = -i e^{ix}/x
  for (int n = 0; n < ell; ++n) {
    const cplx hn = (2.0 * n + 1.0) / x * hc - hm;
    hm = hc;
    hc = hn;
    if (std::abs(hc.real()) > kRescale || std::abs(hc.imag()) > kRescale) {
      hm /= kRescale;
      hc /= kRescale;
      slog += kRescaleLog;
    }
  }
  SphHankelPair out;
  out.h = hc;
  out.hp = hm - (ell + 1.0) / x * hc;
  out.scale_log = slog;
  if (!scaled) {
    if (slog > 700.0)
      throw DomainError(
          "sph_hankel1: unscaled value overflows at this order; "
          "request scaled output");
    out.h = apply_scale(out.h, slog);
    out.hp = apply_scale(out.hp, slog);
    out.scale_log = 0.0;
  }
  return out;
}

JHCrossProducts jh_cross_products(int ell, cplx k) {
  if (k == cplx(0.0, 0.0))
    throw SingularityError("jh_cross_products: evaluation at k = 0");
  if (k.imag() < -300.0)
    throw DomainError(
        "jh_cross_products: products overflow for Im k < -300");
  const SphBesselPair J = sph_bessel_j(ell, k, /*scaled=*/true);
  const SphHankelPair H = sph_hankel1(ell, k, /*scaled=*/true);
  // For Im k >= 0 the analytic parts of the two logs cancel exactly; what
  // remains is the (quantized) renormalization residue.
  const double slog = J.scale_log + H.scale_log;
  JHCrossProducts out;
  out.hj = apply_scale(H.h * J.j, slog);
  out.hjp = apply_scale(H.h * J.jp, slog);
  out.hpj = apply_scale(H.hp * J.j, slog);
  out.hpjp = apply_scale(H.hp * J.jp, slog);
  return out;
}

JHProducts scaled_jh_products(int ell, cplx k) {
  const JHCrossProducts c = jh_cross_products(ell, k);
  return {c.hj, c.hjp};
}

double real_sph_harm(int ell, int m, double theta, double phi) {
  if (ell < 0 || std::abs(m) > ell)
    throw DomainError("real_sph_harm: require 0 <= |m| <= l");
  if (ell > 2000) throw DomainError("real_sph_harm: order exceeds 2000");
  const int am = std::abs(m);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  // Fully normalized associated Legendre recurrence (Condon-Shortley phase).
  double pmm = std::sqrt(1.0 / (4.0 * M_PI));
  for (int i = 1; i <= am; ++i)
    pmm *= -std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * st;
  double p = pmm;  // P~_{am}^{am}
  if (ell > am) {
    double pm1 = pmm;
    double pcur = std::sqrt(2.0 * am + 3.0) * ct * pmm;  // P~_{am+1}^{am}
    for (int l = am + 2; l <= ell; ++l) {
      const double a =
          std::sqrt((4.0 * l * l - 1.0) /
                    (static_cast<double>(l) * l - static_cast<double>(am) * am));
      const double b =
          std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(am) * am) /
                    (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double pnext = a * (ct * pcur - b * pm1);
      pm1 = pcur;
      pcur = pnext;
    }
    p = pcur;
  }
  if (m == 0) return p;
  const double sq2 = std::sqrt(2.0);
  return (m > 0) ? sq2 * p * std::cos(am * phi) : sq2 * p * std::sin(am * phi);
}

}  // namespace nlpbem::specfun
