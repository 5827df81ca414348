#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wkbsplit/errors.hpp"
#include "wkbsplit/wkb_state.hpp"

using namespace wkbsplit;
using testutil::gaussian_state;
using testutil::random_band_limited;

TEST_CASE("assemble_wave: zero phase returns the amplitude") {
  Grid g(1, 64, 4.0);
  WkbState s = gaussian_state(g, 1.3, 0.7, 0.0, 1.0);
  ComplexField u = assemble_wave(s, 0.5);
  CHECK(testutil::max_abs_diff(u.values(), s.amplitude.values()) == 0.0);
}

TEST_CASE("assemble_wave: linear phase on the lattice gives a pure mode") {
  Grid g(1, 64, M_PI);
  const double eps = 0.25;
  const double k0 = g.wavenumber(4);
  std::vector<double> phi(g.size());
  for (int i = 0; i < 64; ++i) phi[i] = eps * k0 * g.coordinate(i);
  std::vector<Complex> a(g.size(), Complex(1.0));
  WkbState s(RealField(g, std::move(phi)),
             ComplexField::from_values(g, std::move(a)));
  ComplexField u = assemble_wave(s, eps);
  for (int i = 0; i < 64; ++i)
    CHECK(std::abs(u.values()[i] -
                   std::exp(Complex(0.0, k0 * g.coordinate(i)))) < 1e-13);
}

TEST_CASE("assemble_wave preserves the modulus pointwise") {
  Grid g(1, 128, 6.0);
  ComplexField amp = random_band_limited(g, 5);
  RealField phase = testutil::random_real_band_limited(g, 6);
  WkbState s(phase, amp);
  ComplexField u = assemble_wave(s, 1.0 / 16.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(std::abs(u.values()[i]) - std::abs(amp.values()[i])) <
          1e-13);
}

TEST_CASE("assemble_wave rejects nonpositive eps") {
  Grid g(1, 64, 1.0);
  WkbState s = gaussian_state(g);
  CHECK_THROWS_AS(assemble_wave(s, 0.0), ParameterError);
  CHECK_THROWS_AS(assemble_wave(s, -1.0), ParameterError);
}

TEST_CASE("observables of a plane wave") {
  Grid g(1, 64, M_PI);
  const double eps = 0.125;
  const double k0 = g.wavenumber(5);
  std::vector<Complex> u(g.size());
  for (int i = 0; i < 64; ++i)
    u[i] = std::exp(Complex(0.0, k0 * g.coordinate(i)));
  Observables obs = observables(ComplexField::from_values(g, std::move(u)), eps);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(obs.density.values()[i] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(obs.current[0].values()[i] ==
          doctest::Approx(eps * k0).epsilon(1e-12));
  }
}

TEST_CASE("real-valued wave has vanishing current") {
  Grid g(1, 128, 8.0);
  std::vector<Complex> u(g.size());
  for (int i = 0; i < 128; ++i) {
    const double x = g.coordinate(i);
    u[i] = std::exp(-0.5 * x * x);
  }
  Observables obs = observables(ComplexField::from_values(g, std::move(u)), 0.5);
  CHECK(linf_norm(obs.current[0]) < 1e-12);
}

TEST_CASE("current matches the WKB product-rule expansion") {
  // J = |a|^2 grad phi + eps Im(conj(a) grad a) for u = a e^{i phi/eps}.
  Grid g(1, 256, 8.0 * M_PI);
  const double eps = 0.5;
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.3, 0.5);
  Observables obs = observables(assemble_wave(s, eps), eps);

  const auto dphi = gradient(s.phase)[0];
  const auto da = gradient(s.amplitude)[0];
  double max_err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex a = s.amplitude.values()[i];
    const double expected =
        std::norm(a) * dphi.values()[i] +
        eps * std::imag(std::conj(a) * da.values()[i]);
    max_err = std::max(max_err, std::abs(obs.current[0].values()[i] - expected));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("mass consistency: integral of the density equals the squared L2 norm") {
  Grid g(1, 128, 5.0);
  ComplexField u = random_band_limited(g, 21);
  Observables obs = observables(u, 0.25);
  CHECK(l1_norm(obs.density) ==
        doctest::Approx(mass(u)).epsilon(1e-12));  // density >= 0
  double min_density = 0.0;
  for (double v : obs.density.values()) min_density = std::min(min_density, v);
  CHECK(min_density >= -1e-13);
}

TEST_CASE("observables are gauge covariant") {
  Grid g(1, 128, 5.0);
  ComplexField u = random_band_limited(g, 33);
  std::vector<Complex> v(u.values().begin(), u.values().end());
  const Complex gauge = std::polar(1.0, 1.234);
  for (Complex& w : v) w *= gauge;
  ComplexField ug = ComplexField::from_values(g, std::move(v));

  Observables o1 = observables(u, 0.5);
  Observables o2 = observables(ug, 0.5);
  CHECK(linf_norm(o1.density) > 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(o1.density.values()[i] - o2.density.values()[i]) < 1e-13);
    CHECK(std::abs(o1.current[0].values()[i] - o2.current[0].values()[i]) <
          1e-13);
  }
}

TEST_CASE("l2_distance basics") {
  Grid g(1, 64, M_PI);
  ComplexField u = random_band_limited(g, 2);
  CHECK(l2_distance(u, u) == 0.0);

  // pure mode vs zero on [-pi, pi): sqrt(2 pi)
  std::vector<Complex> v(g.size());
  for (int i = 0; i < 64; ++i)
    v[i] = std::exp(Complex(0.0, g.wavenumber(2) * g.coordinate(i)));
  ComplexField mode = ComplexField::from_values(g, std::move(v));
  CHECK(l2_distance(mode, ComplexField(g)) ==
        doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-13));
}

TEST_CASE("l2_distance satisfies the triangle inequality") {
  Grid g(1, 64, 2.0);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ComplexField a = random_band_limited(g, 100 + seed);
    ComplexField b = random_band_limited(g, 200 + seed);
    ComplexField c = random_band_limited(g, 300 + seed);
    CHECK(l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-14);
  }
}

TEST_CASE("wkb state requires a single grid") {
  Grid g(1, 64, 1.0);
  Grid g2(1, 128, 1.0);
  CHECK_THROWS_AS(WkbState(RealField(g), ComplexField(g2)),
                  GridMismatchError);
}
