#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "nlpbem/errors.hpp"
#include "nlpbem/specfun.hpp"
#include "oracles.hpp"

using nlpbem::specfun::jh_cross_products;
using nlpbem::specfun::real_sph_harm;
using nlpbem::specfun::scaled_jh_products;
using nlpbem::specfun::sph_bessel_j;
using nlpbem::specfun::sph_hankel1;
using cplx = std::complex<double>;
static const cplx I(0.0, 1.0);

static double rel(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

TEST_CASE("bessel j at special points") {
  auto r = sph_bessel_j(0, M_PI);
  CHECK(std::abs(r.j) < 1e-15);
  CHECK(rel(r.jp, -1.0 / M_PI) < 1e-14);
  CHECK(r.scale_log == 0.0);

  auto z = sph_bessel_j(0, cplx(0.0, 0.0));
  CHECK(z.j == cplx(1.0, 0.0));
  CHECK(z.jp == cplx(0.0, 0.0));
  CHECK(sph_bessel_j(3, cplx(0.0, 0.0)).j == cplx(0.0, 0.0));
}

TEST_CASE("bessel j against power series, complex argument") {
  const cplx x(1.5, 0.5);
  auto got = sph_bessel_j(2, x);
  auto want = oracle::series_sph_bessel_j(2, x);
  CHECK(rel(got.j, want.j) < 1e-12);
  CHECK(rel(got.jp, want.jp) < 1e-12);

  for (int ell : {0, 1, 4, 7}) {
    for (cplx y : {cplx(0.3, 0.0), cplx(2.0, 1.0), cplx(0.1, 0.9), cplx(4.0, -0.5)}) {
      auto g = sph_bessel_j(ell, y);
      auto w = oracle::series_sph_bessel_j(ell, y);
      CHECK(rel(g.j, w.j) < 1e-11);
      CHECK(rel(g.jp, w.jp) < 1e-11);
    }
  }
}

TEST_CASE("hankel h1 closed forms") {
  // h_0(i) = -1/e
  auto h0 = sph_hankel1(0, cplx(0.0, 1.0));
  CHECK(rel(h0.h, -std::exp(-1.0)) < 1e-14);

  // low orders against closed-form expressions at several arguments
  for (cplx x : {cplx(2.0, 0.0), cplx(0.7, 0.3), cplx(1.0, 2.0), cplx(5.0, 0.1)}) {
    CHECK(rel(sph_hankel1(0, x).h, oracle::closed_h0(x)) < 1e-13);
    CHECK(rel(sph_hankel1(1, x).h, oracle::closed_h1(x)) < 1e-13);
  }
}

TEST_CASE("scaled hankel stays finite high on the imaginary axis") {
  auto s = sph_hankel1(0, cplx(0.0, 100.0), /*scaled=*/true);
  CHECK(std::isfinite(std::abs(s.h)));
  CHECK(std::abs(s.scale_log + 100.0) < 1.0);
  // true value is -exp(-100)/100; rescale by the O(1) leftover factor
  const cplx rescaled = s.h * std::exp(s.scale_log + 100.0);
  CHECK(std::abs(rescaled - cplx(-0.01, 0.0)) < 1e-12);
}

TEST_CASE("scaled and unscaled hankel agree where both are finite") {
  for (int ell : {0, 1, 3, 7, 10}) {
    for (cplx x : {cplx(5.0, 5.0), cplx(2.0, 8.0), cplx(1.0, 20.0)}) {
      auto u = sph_hankel1(ell, x);
      auto s = sph_hankel1(ell, x, true);
      CHECK(rel(s.h * std::exp(s.scale_log), u.h) < 1e-10);
      CHECK(rel(s.hp * std::exp(s.scale_log), u.hp) < 1e-10);
    }
  }
  for (int ell : {0, 2, 5}) {
    cplx x(0.0, 40.0);
    auto u = sph_bessel_j(ell, x);
    auto s = sph_bessel_j(ell, x, true);
    CHECK(rel(s.j * std::exp(s.scale_log), u.j) < 1e-10);
    CHECK(rel(s.jp * std::exp(s.scale_log), u.jp) < 1e-10);
  }
}

TEST_CASE("product h0*j0 closed form and cross-path consistency") {
  auto p = scaled_jh_products(0, cplx(1.0, 0.0));
  const cplx want = -I * std::exp(I) * std::sin(1.0);
  CHECK(rel(p.hj, want) < 1e-13);

  // same product through the unscaled route at a strongly damped argument
  const cplx k(0.0, 20.0);
  for (int ell : {0, 1, 2, 5}) {
    auto prod = scaled_jh_products(ell, k);
    auto h = sph_hankel1(ell, k);
    auto j = sph_bessel_j(ell, k);
    CHECK(rel(prod.hj, h.h * j.j) < 1e-10);
    CHECK(rel(prod.hjp, h.h * j.jp) < 1e-10);
  }

  // extreme argument: products stay finite where factors overflow
  auto big = scaled_jh_products(1, cplx(0.0, 1.0e5));
  CHECK(std::isfinite(std::abs(big.hj)));
  CHECK(std::isfinite(std::abs(big.hjp)));
}

TEST_CASE("product identity Im(i k h j) = k j^2 on the real axis") {
  for (int ell : {0, 1, 2, 6}) {
    for (double k : {0.8, 3.7, 11.2}) {
      auto p = scaled_jh_products(ell, cplx(k, 0.0));
      const double j = sph_bessel_j(ell, cplx(k, 0.0)).j.real();
      CHECK(std::abs(std::imag(I * k * p.hj) - k * j * j) < 1e-12 * (1.0 + k * j * j));
    }
  }
}

TEST_CASE("cross products satisfy the Wronskian identity") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> mag(std::log(0.1), std::log(50.0));
  std::uniform_real_distribution<double> ang(0.05, M_PI - 0.05);
  std::uniform_int_distribution<int> ells(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const int ell = ells(rng);
    const double m = std::exp(mag(rng)), a = ang(rng);
    const cplx x = m * std::exp(I * a);  // upper half plane
    auto c = jh_cross_products(ell, x);
    const cplx wronskian = c.hpj - c.hjp;  // h' j - h j' = +i / x^2
    CHECK(rel(wronskian, I / (x * x)) < 1e-10);
  }
}

TEST_CASE("recurrence relations for j") {
  for (int ell : {1, 2, 5, 9}) {
    for (cplx x : {cplx(1.7, 0.0), cplx(2.5, 1.5), cplx(0.6, 0.2)}) {
      const cplx jm = sph_bessel_j(ell - 1, x).j;
      const cplx j0 = sph_bessel_j(ell, x).j;
      const cplx jp1 = sph_bessel_j(ell + 1, x).j;
      const double scale = std::abs(jm) + std::abs(jp1);
      CHECK(std::abs(jm + jp1 - (2.0 * ell + 1.0) * j0 / x) < 1e-11 * scale);
      const cplx deriv = sph_bessel_j(ell, x).jp;
      CHECK(std::abs(deriv - (jm - (ell + 1.0) * j0 / x)) < 1e-11 * scale);
    }
  }
}

TEST_CASE("spherical harmonics: closed forms and orthonormality") {
  CHECK(std::abs(real_sph_harm(0, 0, 0.3, 1.1) - 1.0 / std::sqrt(4.0 * M_PI)) < 1e-14);
  for (double th : {0.2, 1.0, 2.4}) {
    CHECK(std::abs(real_sph_harm(1, 0, th, 0.7) -
                   std::sqrt(3.0 / (4.0 * M_PI)) * std::cos(th)) < 1e-13);
  }

  // product quadrature: 64-node Gauss in cos(theta) x 128 uniform in phi
  auto g = oracle::gauss_legendre(64);
  const int nphi = 128;
  struct Mode { int l, m; };
  std::vector<Mode> modes;
  for (int l = 0; l <= 4; ++l)
    for (int m = -l; m <= l; ++m) modes.push_back({l, m});
  for (size_t a = 0; a < modes.size(); ++a) {
    for (size_t b = a; b < modes.size(); ++b) {
      double acc = 0.0;
      for (int i = 0; i < 64; ++i) {
        const double th = std::acos(g.x[static_cast<size_t>(i)]);
        double ring = 0.0;
        for (int p = 0; p < nphi; ++p) {
          const double ph = 2.0 * M_PI * p / nphi;
          ring += real_sph_harm(modes[a].l, modes[a].m, th, ph) *
                  real_sph_harm(modes[b].l, modes[b].m, th, ph);
        }
        acc += g.w[static_cast<size_t>(i)] * ring * (2.0 * M_PI / nphi);
      }
      const double want = (a == b) ? 1.0 : 0.0;
      CHECK(std::abs(acc - want) < 1e-8);
    }
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(sph_hankel1(0, cplx(0.0, 0.0)), nlpbem::SingularityError);
  CHECK_THROWS_AS(scaled_jh_products(2, cplx(0.0, 0.0)), nlpbem::SingularityError);
  CHECK_THROWS_AS(sph_bessel_j(0, cplx(std::nan(""), 0.0)), nlpbem::DomainError);
  CHECK_THROWS_AS(sph_bessel_j(0, cplx(3.0e5, 0.0)), nlpbem::DomainError);
  CHECK_THROWS_AS(real_sph_harm(1, 2, 0.5, 0.5), nlpbem::DomainError);
  CHECK_THROWS_AS(sph_hankel1(0, cplx(0.0, 700.0), false), nlpbem::DomainError);
}
