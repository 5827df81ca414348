#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wkbsplit/errors.hpp"
#include "wkbsplit/slope_fit.hpp"
#include "wkbsplit/wave_splitting.hpp"
#include "wkbsplit/wkb_flows.hpp"

using namespace wkbsplit;
using testutil::gaussian_state;

namespace {

GrenierParams gparams(double eps, double lambda, int sigma = 1) {
  GrenierParams p;
  p.eps = eps;
  p.lambda = lambda;
  p.sigma = sigma;
  return p;
}

ModelParams wparams(double eps, double lambda, int sigma = 1) {
  ModelParams p;
  p.eps = eps;
  p.lambda = lambda;
  p.sigma = sigma;
  p.horizon = 1.0;
  return p;
}

double state_distance(const WkbState& a, const WkbState& b) {
  return l2_distance(a.phase, b.phase) + l2_distance(a.amplitude, b.amplitude);
}

}  // namespace

TEST_CASE("flow_Y: explicit gauge flow") {
  Grid g(1, 64, 4.0);

  SUBCASE("lambda = 0 is the identity") {
    WkbState s = gaussian_state(g);
    WkbState r = flow_Y(s, 0.3, gparams(0.5, 0.0));
    CHECK(testutil::max_abs_diff(r.phase.values(), s.phase.values()) == 0.0);
    CHECK(testutil::max_abs_diff(r.amplitude.values(),
                                 s.amplitude.values()) == 0.0);
  }
  SUBCASE("unit amplitude shifts the phase by t lambda") {
    WkbState s = gaussian_state(g, 1.0, 0.0, 0.2, 0.5);  // |a| = 1 exactly
    WkbState r = flow_Y(s, 0.25, gparams(0.5, 1.0));
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(r.phase.values()[i] ==
            doctest::Approx(s.phase.values()[i] - 0.25).epsilon(1e-14));
    CHECK(testutil::max_abs_diff(r.amplitude.values(),
                                 s.amplitude.values()) == 0.0);
  }
  SUBCASE("flow property holds exactly") {
    WkbState s = gaussian_state(g, 0.9, 0.6, 0.1, 0.8);
    const GrenierParams p = gparams(0.25, 0.7, 2);
    WkbState two = flow_Y(flow_Y(s, 0.1, p), 0.2, p);
    WkbState one = flow_Y(s, 0.3, p);
    CHECK(testutil::max_abs_diff(two.phase.values(), one.phase.values()) <
          1e-15);
  }
}

TEST_CASE("flow_X with zero phase is the semiclassical free flow of a") {
  Grid g(1, 128, 8.0);
  const double eps = 0.5;
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.0, 1.0);
  const double t = 0.1;
  WkbState r = flow_X(s, t, gparams(eps, 1.0));
  CHECK(linf_norm(r.phase) < 1e-12);
  ComplexField expected = free_step(s.amplitude, t, wparams(eps, 0.0));
  CHECK(l2_distance(r.amplitude, expected) < 1e-9);
}

TEST_CASE("flow_X eikonal matches the method-of-characteristics oracle") {
  Grid g(1, 256, 4.0 * M_PI);
  std::vector<double> phi(g.size());
  for (int i = 0; i < 256; ++i) phi[i] = std::cos(g.coordinate(i));
  std::vector<Complex> a(g.size());
  for (int i = 0; i < 256; ++i) {
    const double x = g.coordinate(i);
    a[i] = std::exp(-0.25 * x * x);
  }
  WkbState s(RealField(g, std::move(phi)),
             ComplexField::from_values(g, std::move(a)));
  const double t = 0.1;
  WkbState r = flow_X(s, t, gparams(0.0625, 0.0));
  const auto oracle = testutil::eikonal_cosine_oracle(g, 1.0, t);
  CHECK(testutil::max_abs_diff(r.phase.values(), oracle) < 1e-6);
}

TEST_CASE("flow_X transport conserves the amplitude mass") {
  Grid g(1, 256, 8.0 * M_PI);
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.3, 0.5);
  const GrenierParams p = gparams(1e-3, 0.0);
  WkbState r = flow_X(s, 0.1, p);
  CHECK(mass(r.amplitude) == doctest::Approx(mass(s.amplitude)).epsilon(1e-8));
}

TEST_CASE("flow_X consistency: assemble after flow equals free flow of the wave") {
  Grid g(1, 512, 8.0 * M_PI);
  const double eps = 1.0 / 16.0;
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.1, 0.5);
  const double t = 1e-2;
  ComplexField via_wkb = assemble_wave(flow_X(s, t, gparams(eps, 0.0)), eps);
  ComplexField via_wave =
      free_step(assemble_wave(s, eps), t, wparams(eps, 0.0));
  CHECK(l2_distance(via_wkb, via_wave) < 1e-8);
}

TEST_CASE("flow_X caustic monitor trips on strong negative curvature") {
  Grid g(1, 128, 2.0 * M_PI);
  std::vector<double> phi(g.size());
  for (int i = 0; i < 128; ++i) phi[i] = 100.0 * std::cos(g.coordinate(i));
  WkbState s(RealField(g, std::move(phi)), ComplexField(g));
  try {
    flow_X(s, 0.05, gparams(0.5, 0.0));
    FAIL("expected HorizonError");
  } catch (const HorizonError& e) {
    CHECK(e.critical_time > 0.0);
    CHECK(e.critical_time < 0.05);
  }
}

TEST_CASE("lie_trotter_wkb with lambda = 0 equals flow_X") {
  Grid g(1, 128, 8.0);
  WkbState s = gaussian_state(g);
  const GrenierParams p = gparams(0.25, 0.0);
  WkbState a = lie_trotter_wkb(s, 0.05, p);
  WkbState b = flow_X(s, 0.05, p);
  CHECK(state_distance(a, b) < 1e-14);
}

TEST_CASE("WKB/wave commutation identity for one Lie-Trotter step") {
  Grid g(1, 512, 8.0 * M_PI);
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.1, 0.5);
  const double dt = 1e-2;
  for (double eps : {1.0 / 16.0, 1.0 / 64.0}) {
    ComplexField via_wkb =
        assemble_wave(lie_trotter_wkb(s, dt, gparams(eps, 0.5)), eps);
    ComplexField via_wave =
        lie_trotter_step(assemble_wave(s, eps), dt, wparams(eps, 0.5));
    CHECK(l2_distance(via_wkb, via_wave) < 1e-8);
  }
}

TEST_CASE("grenier_reference basics") {
  Grid g(1, 256, 8.0 * M_PI);
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.1, 0.5);

  SUBCASE("t = 0 is the identity") {
    WkbReference r = grenier_reference(s, 0.0, gparams(0.25, 1.0));
    CHECK(state_distance(r.state, s) == 0.0);
  }
  SUBCASE("lambda = 0 with zero phase reduces to flow_X") {
    WkbState s0 = gaussian_state(g, 1.0, 0.5, 0.0, 1.0);
    const GrenierParams p = gparams(0.25, 0.0);
    WkbReference r = grenier_reference(s0, 0.08, p, 1e-11);
    WkbState f = flow_X(s0, 0.08, p);
    CHECK(state_distance(r.state, f) < 1e-9);
  }
  SUBCASE("certificate meets the tolerance") {
    WkbReference r = grenier_reference(s, 0.1, gparams(0.125, 1.0), 1e-9);
    CHECK(r.certificate < 1e-9);
  }
  SUBCASE("amplitude mass is conserved along the full system") {
    // Transport in divergence form plus a skew dispersion term.
    WkbReference r = grenier_reference(s, 0.1, gparams(0.125, 1.0), 1e-10);
    CHECK(std::abs(mass(r.state.amplitude) - mass(s.amplitude)) <
          1e-8 * mass(s.amplitude));
  }
}

TEST_CASE("independent solver agreement: Grenier system vs wave splitting") {
  Grid g(1, 512, 8.0 * M_PI);
  const double eps = 0.125;
  WkbState s = gaussian_state(g, 1.0, 0.5, 0.1, 0.5);
  const double t = 0.125;
  WkbReference wkb = grenier_reference(s, t, gparams(eps, 1.0), 1e-10);
  WaveReference wave =
      reference_solve(assemble_wave(s, eps), t, wparams(eps, 1.0), 1e-10);
  CHECK(l2_distance(assemble_wave(wkb.state, eps), wave.u) < 1e-6);
}

TEST_CASE("iterative scheme: closed form at stage 1 for zero initial phase") {
  Grid g(1, 128, 8.0);
  const double eps = 0.25;
  WkbState s0 = gaussian_state(g, 1.0, 0.5, 0.0, 1.0);
  const double t = 0.05;
  const GrenierParams p = gparams(eps, 1.0);
  NormParams np{1.0, 1.0, 0.25, 0.25, 1.0, false};
  IterationReport rep = grenier_iterative(s0, t, p, 1, np);
  REQUIRE(rep.stages_run == 1);

  // With phi_j = phi0 = 0 frozen: phi_1(t) = -t lambda |a0|^2 and a_1 is the
  // free semiclassical flow of a0.
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expected =
        -t * p.lambda * std::norm(s0.amplitude.values()[i]);
    CHECK(rep.state.phase.values()[i] ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  ComplexField free_amp = free_step(s0.amplitude, t, wparams(eps, 0.0));
  CHECK(l2_distance(rep.state.amplitude, free_amp) < 1e-9);
}

TEST_CASE("iterative scheme contracts and agrees with the direct reference") {
  Grid g(1, 256, 8.0 * M_PI);
  const double eps = 1.0 / 16.0;
  WkbState s0 = gaussian_state(g, 1.0, 0.5, 0.1, 0.5);
  const double t = 0.05;
  const GrenierParams p = gparams(eps, 1.0);
  NormParams np{1.0, 1.0, 0.25, 0.25, 1.0, false};

  IterationReport rep = grenier_iterative(s0, t, p, 25, np, 1e-8);
  CHECK(rep.contracted);
  REQUIRE(rep.stage_differences.size() >= 3);
  for (std::size_t i = 1; i + 1 < rep.stage_differences.size(); ++i)
    CHECK(rep.stage_differences[i] < 0.9 * rep.stage_differences[i - 1]);

  WkbState ref = grenier_reference(s0, t, p, 1e-11).state;
  CHECK(state_distance(rep.state, ref) < 1e-6);
}

TEST_CASE("linearized flow: linearity and triviality") {
  Grid g(1, 128, 8.0);
  const double eps = 0.25;
  WkbState s0 = gaussian_state(g, 1.0, 0.5, 0.2, 0.5);
  const GrenierParams p = gparams(eps, 1.0);
  const double t = 0.05;
  Trajectory base(g);
  grenier_reference(s0, t, p, 1e-10, &base);

  SUBCASE("zero perturbation stays zero") {
    PhaseAmpPair zero{RealField(g), ComplexField(g)};
    PhaseAmpPair out = linearized_flow(base, zero, t, p);
    CHECK(linf_norm(out.phase) < 1e-14);
    CHECK(max_abs(out.amplitude) < 1e-14);
  }
  SUBCASE("homogeneity: doubling the input doubles the output") {
    PhaseAmpPair pert{testutil::random_real_band_limited(g, 5, 0.3),
                      testutil::random_band_limited(g, 6, 0.3)};
    PhaseAmpPair doubled{RealField(g), ComplexField(g)};
    {
      std::vector<double> ph(pert.phase.values().begin(),
                             pert.phase.values().end());
      for (double& v : ph) v *= 2.0;
      std::vector<Complex> am(pert.amplitude.values().begin(),
                              pert.amplitude.values().end());
      for (Complex& v : am) v *= 2.0;
      doubled = PhaseAmpPair{RealField(g, std::move(ph)),
                             ComplexField::from_values(g, std::move(am))};
    }
    PhaseAmpPair o1 = linearized_flow(base, pert, t, p);
    PhaseAmpPair o2 = linearized_flow(base, doubled, t, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(o2.phase.values()[i] - 2.0 * o1.phase.values()[i]) <
            1e-11);
      CHECK(std::abs(o2.amplitude.values()[i] -
                     2.0 * o1.amplitude.values()[i]) < 1e-11);
    }
  }
}

TEST_CASE("linearized flow matches the directional derivative of the flow") {
  Grid g(1, 128, 8.0);
  const double eps = 0.25;
  WkbState s0 = gaussian_state(g, 1.0, 0.5, 0.2, 0.5);
  const GrenierParams p = gparams(eps, 1.0);
  const double t = 0.04;
  Trajectory base(g);
  grenier_reference(s0, t, p, 1e-11, &base);

  PhaseAmpPair delta{testutil::random_real_band_limited(g, 15, 0.2),
                     testutil::random_band_limited(g, 16, 0.2)};
  PhaseAmpPair lin = linearized_flow(base, delta, t, p);

  std::vector<double> hs, errs;
  for (double h : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
    std::vector<double> ph(s0.phase.values().begin(), s0.phase.values().end());
    std::vector<Complex> am(s0.amplitude.values().begin(),
                            s0.amplitude.values().end());
    for (std::size_t i = 0; i < g.size(); ++i) {
      ph[i] += h * delta.phase.values()[i];
      am[i] += h * delta.amplitude.values()[i];
    }
    WkbState sp(RealField(g, std::move(ph)),
                ComplexField::from_values(g, std::move(am)));
    WkbState flowed = grenier_reference(sp, t, p, 1e-11).state;
    WkbState based = grenier_reference(s0, t, p, 1e-11).state;
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double dp =
          (flowed.phase.values()[i] - based.phase.values()[i]) / h -
          lin.phase.values()[i];
      const Complex da =
          (flowed.amplitude.values()[i] - based.amplitude.values()[i]) / h -
          lin.amplitude.values()[i];
      err = std::max(err, std::max(std::abs(dp), std::abs(da)));
    }
    hs.push_back(h);
    errs.push_back(err);
  }
  const SlopeFit fit = fit_loglog(hs, errs, 1e-13);
  CHECK(fit.slope >= 0.9);
}

TEST_CASE("2d flows: consistency contract and step mass conservation") {
  // N = 128 keeps the 2/3 cutoff above the bandwidth of the quadratic
  // products (their spectral decay rate is half the field's).
  Grid g(2, 128, 2.0 * M_PI);
  const double eps = 0.25;
  WkbState s = gaussian_state(g, 1.0, 1.0, 0.1, 1.0);

  SUBCASE("assemble after flow_X equals the free flow of the wave") {
    const double t = 1e-2;
    ComplexField via_wkb = assemble_wave(flow_X(s, t, gparams(eps, 0.0)), eps);
    ComplexField via_wave =
        free_step(assemble_wave(s, eps), t, wparams(eps, 0.0));
    CHECK(l2_distance(via_wkb, via_wave) < 1e-8);
  }
  SUBCASE("wave-level Lie-Trotter conserves mass") {
    ModelParams p = wparams(eps, 1.0);
    ComplexField u = assemble_wave(s, eps);
    const double m0 = mass(u);
    for (int i = 0; i < 4; ++i) u = lie_trotter_step(u, 5e-3, p);
    CHECK(mass(u) == doctest::Approx(m0).epsilon(1e-11));
  }
  SUBCASE("cross-module commutation") {
    const double dt = 1e-2;
    ComplexField via_wkb =
        assemble_wave(lie_trotter_wkb(s, dt, gparams(eps, 0.5)), eps);
    ComplexField via_wave =
        lie_trotter_step(assemble_wave(s, eps), dt, wparams(eps, 0.5));
    CHECK(l2_distance(via_wkb, via_wave) < 1e-8);
  }
}

TEST_CASE("trajectory interpolation reproduces knots and midpoints") {
  Grid g(1, 64, 4.0);
  WkbState s0 = gaussian_state(g);
  const GrenierParams p = gparams(0.5, 1.0);
  Trajectory traj(g);
  grenier_reference(s0, 0.02, p, 1e-10, &traj);
  REQUIRE(traj.samples() >= 3);

  // Knot reproduction is exact.
  std::vector<Complex> phi, a;
  traj.eval(traj.times()[1], phi, a);
  WkbState knot = traj.state(1);
  ComplexField phi_f = ComplexField::from_spectrum(g, std::move(phi));
  CHECK(l2_distance(real_part_checked(phi_f, 1e-10, "test"), knot.phase) <
        1e-13);
}
