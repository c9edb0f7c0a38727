#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "nlpbem/errors.hpp"
#include "nlpbem/medium.hpp"

using nlpbem::drude_eps;
using nlpbem::DrudeParams;
using nlpbem::eps_from_z;
using nlpbem::make_spectral_point;
using nlpbem::z_from_eps;
using cplx = std::complex<double>;

TEST_CASE("drude permittivity at exact points") {
  CHECK(std::abs(drude_eps(1.0 / std::sqrt(2.0), {0.0}) - cplx(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(drude_eps(1.0, {0.0})) < 1e-15);
  // at omega=1/2, gamma=1/10: eps = 1 - 1/(1/4 + i/20) = -37/13 + (10/13) i
  const cplx e = drude_eps(0.5, {0.1});
  CHECK(std::abs(e.real() + 37.0 / 13.0) < 1e-14);
  CHECK(std::abs(e.imag() - 10.0 / 13.0) < 1e-14);
  CHECK(e.imag() > 0.0);
}

TEST_CASE("lossy permittivity always has positive imaginary part") {
  for (double w = 0.05; w <= 2.0; w += 0.007)
    CHECK(drude_eps(w, {0.02}).imag() > 0.0);
}

TEST_CASE("spectral parameter at exact points") {
  CHECK(std::abs(z_from_eps(cplx(-1.0, 0.0)) - cplx(0.0, 1.0 / std::sqrt(2.0))) < 1e-14);
  CHECK(std::abs(z_from_eps(cplx(0.5, 0.0)) - cplx(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(z_from_eps(cplx(-2.0, 0.0)) - cplx(0.0, std::sqrt(2.0 / 3.0))) < 1e-14);
  CHECK(std::abs(eps_from_z(cplx(1.0, 0.0)) - cplx(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(eps_from_z(cplx(1000.0, 0.0)) - 1.0) < 1e-5);
}

TEST_CASE("roundtrip and branch selection") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> re(-30.0, 0.9);
  std::uniform_real_distribution<double> im(1e-8, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const cplx eps(re(rng), im(rng));
    const cplx z = z_from_eps(eps);
    CHECK(z.real() > 0.0);
    CHECK(z.imag() > 0.0);  // passive media map to the open first quadrant
    CHECK(std::abs(eps_from_z(z) - eps) < 1e-12 * std::abs(eps));
  }
  // real eps below the pole maps to the positive imaginary axis
  for (double e = -40.0; e < -0.01; e += 0.37) {
    const cplx z = z_from_eps(cplx(e, 0.0));
    CHECK(z.real() == 0.0);
    CHECK(z.imag() > 0.0);
  }
  // real eps in (0,1) maps to the positive real axis
  for (double e = 0.05; e < 1.0; e += 0.06) {
    const cplx z = z_from_eps(cplx(e, 0.0));
    CHECK(z.imag() == 0.0);
    CHECK(z.real() > 0.0);
  }
}

TEST_CASE("spectral point bundles the trajectory consistently") {
  const DrudeParams drude{0.05};
  for (double w : {0.3, 0.58, 0.9, 1.4}) {
    auto p = make_spectral_point(w, drude, 0.02);
    CHECK(p.omega_hat == w);
    CHECK(p.h == 0.02);
    CHECK(std::abs(p.eps - drude_eps(w, drude)) == 0.0);
    CHECK(std::abs(p.z * p.z - p.eps / (1.0 - p.eps)) < 1e-14 * std::abs(p.z * p.z));
    CHECK(std::abs(p.k - p.z / 0.02) == 0.0);
    CHECK(p.z.real() > 0.0);
    CHECK(p.z.imag() > 0.0);
  }
  // weak damping: Im eps ~ gamma / omega^3 along the trajectory
  const double g = 1e-4;
  for (double w : {0.5, 0.8, 1.2}) {
    const double im = drude_eps(w, {g}).imag();
    CHECK(std::abs(im - g / (w * w * w)) < 1e-6 * im + 1e-12);
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(drude_eps(0.0, {0.1}), nlpbem::DomainError);
  CHECK_THROWS_AS(drude_eps(-1.0, {0.1}), nlpbem::DomainError);
  CHECK_THROWS_AS(drude_eps(0.5, {-0.1}), nlpbem::DomainError);
  CHECK_THROWS_AS(z_from_eps(cplx(1.0, 0.0)), nlpbem::PoleError);
  CHECK_THROWS_AS(eps_from_z(cplx(0.0, 1.0)), nlpbem::PoleError);
  CHECK_THROWS_AS(eps_from_z(cplx(0.0, -1.0)), nlpbem::PoleError);
  CHECK_THROWS_AS(make_spectral_point(0.5, {0.1}, 0.0), nlpbem::DomainError);
  CHECK_THROWS_AS(make_spectral_point(0.5, {0.1}, -0.01), nlpbem::DomainError);
}
