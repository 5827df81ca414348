#include "wkbsplit/local_error.hpp"

#include <cmath>
#include <vector>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

namespace {

double pow_int(double r, int n) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= r;
  return p;
}

RealField maybe_dealias(const RealField& f, bool on) {
  if (!on) return f;
  return real_part_checked(dealias(complexify(f)), 1e-12, "dealias real");
}

ComplexField maybe_dealias(const ComplexField& f, bool on) {
  return on ? dealias(f) : f;
}

// f(|a|^2) and f'(|a|^2) with f(r) = lambda r^sigma, as grid fields.
RealField nonlinearity_of(const ComplexField& a, const GrenierParams& p) {
  std::vector<double> v(a.grid().size());
  const auto av = a.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = p.lambda * pow_int(std::norm(av[i]), p.sigma);
  return RealField(a.grid(), std::move(v));
}

RealField nonlinearity_prime_of(const ComplexField& a, const GrenierParams& p) {
  std::vector<double> v(a.grid().size());
  const auto av = a.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = p.lambda * p.sigma * pow_int(std::norm(av[i]), p.sigma - 1);
  return RealField(a.grid(), std::move(v));
}

}  // namespace

OperatorOutput apply_A(const WkbState& s, const GrenierParams& p) {
  p.validate();
  const Grid& g = s.amplitude.grid();
  const auto phi_grad = gradient(s.phase);
  const auto a_grad = gradient(s.amplitude);
  const RealField phi_lap = laplacian(s.phase);
  const ComplexField a_lap = laplacian(s.amplitude);

  std::vector<double> phase_out(g.size());
  std::vector<Complex> amp_out(g.size());
  const auto av = s.amplitude.values();
  const auto lapv = phi_lap.values();
  const auto alapv = a_lap.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double grad_sq = 0.0;
    Complex transport(0.0);
    for (int ax = 0; ax < g.dim(); ++ax) {
      const double px = phi_grad[ax].values()[i];
      grad_sq += px * px;
      transport += px * a_grad[ax].values()[i];
    }
    phase_out[i] = -0.5 * grad_sq;
    amp_out[i] = -transport - 0.5 * av[i] * lapv[i] +
                 Complex(0.0, 0.5 * p.eps) * alapv[i];
  }
  return OperatorOutput{
      maybe_dealias(RealField(g, std::move(phase_out)), p.dealias),
      maybe_dealias(ComplexField::from_values(g, std::move(amp_out)),
                    p.dealias)};
}

OperatorOutput apply_B(const WkbState& s, const GrenierParams& p) {
  p.validate();
  const Grid& g = s.amplitude.grid();
  RealField f = nonlinearity_of(s.amplitude, p);
  for (double& v : f.mutate_values()) v = -v;
  return OperatorOutput{std::move(f), ComplexField(g)};
}

OperatorOutput commutator_AB(const WkbState& s, const GrenierParams& p) {
  p.validate();
  const Grid& g = s.amplitude.grid();

  const RealField f = nonlinearity_of(s.amplitude, p);
  const RealField fp = nonlinearity_prime_of(s.amplitude, p);
  const auto f_grad = gradient(f);
  const RealField f_lap = laplacian(f);
  const auto phi_grad = gradient(s.phase);
  const auto a_grad = gradient(s.amplitude);

  // div(|a|^2 grad phi + eps Im(conj(a) grad a)), assembled in physical
  // space component-wise and differentiated spectrally.
  const auto av = s.amplitude.values();
  RealField divergence(g);
  for (int ax = 0; ax < g.dim(); ++ax) {
    std::vector<double> flux(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      flux[i] = std::norm(av[i]) * phi_grad[ax].values()[i] +
                p.eps * std::imag(std::conj(av[i]) * a_grad[ax].values()[i]);
    const auto dflux = gradient(RealField(g, std::move(flux)))[ax];
    auto& dv = divergence.mutate_values();
    for (std::size_t i = 0; i < g.size(); ++i) dv[i] += dflux.values()[i];
  }

  std::vector<double> phase_out(g.size());
  std::vector<Complex> amp_out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double adv = 0.0;
    Complex adv_a(0.0);
    for (int ax = 0; ax < g.dim(); ++ax) {
      adv += phi_grad[ax].values()[i] * f_grad[ax].values()[i];
      adv_a += a_grad[ax].values()[i] * f_grad[ax].values()[i];
    }
    phase_out[i] = adv - divergence.values()[i] * fp.values()[i];
    amp_out[i] = adv_a + 0.5 * av[i] * f_lap.values()[i];
  }
  return OperatorOutput{
      maybe_dealias(RealField(g, std::move(phase_out)), p.dealias),
      maybe_dealias(ComplexField::from_values(g, std::move(amp_out)),
                    p.dealias)};
}

PhaseAmpPair d2_gauge_flow(const WkbState& base, const PhaseAmpPair& pert,
                           double t, const GrenierParams& p) {
  p.validate();
  check_same_grid(base.amplitude.grid(), pert.amplitude.grid(),
                  "d2_gauge_flow");
  const Grid& g = base.amplitude.grid();
  const auto av = base.amplitude.values();
  const auto bv = pert.amplitude.values();
  std::vector<double> phase_out(pert.phase.values().begin(),
                                pert.phase.values().end());
  const double c = 2.0 * p.sigma * p.lambda * t;
  for (std::size_t i = 0; i < g.size(); ++i)
    phase_out[i] -= c * pow_int(std::norm(av[i]), p.sigma - 1) *
                    std::real(std::conj(av[i]) * bv[i]);
  return PhaseAmpPair{RealField(g, std::move(phase_out)), pert.amplitude};
}

LocalErrorNorms measure_local_error(const WkbState& s0, double t,
                                    const GrenierParams& p,
                                    const NormParams& np,
                                    double reference_tol) {
  if (np.ell < 4.0)
    throw ParameterError("measure_local_error: need ell >= 4 for the ell-3 / ell-4 indices");
  const Grid& g = s0.amplitude.grid();
  const WkbState split = lie_trotter_wkb(s0, t, p);
  const WkbState exact =
      grenier_reference(s0, t, p, reference_tol).state;

  std::vector<double> dphi(g.size());
  std::vector<Complex> da(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    dphi[i] = split.phase.values()[i] - exact.phase.values()[i];
    da[i] = split.amplitude.values()[i] - exact.amplitude.values()[i];
  }
  PhaseAmpPair defect{RealField(g, std::move(dphi)),
                      ComplexField::from_values(g, std::move(da))};
  const NormParams at = np.at_time(t);
  const double phase_norm =
      analytic_norm(defect.phase, at.with_ell(np.ell - 3.0));
  const double amp_norm =
      analytic_norm(defect.amplitude, at.with_ell(np.ell - 4.0));
  return LocalErrorNorms{phase_norm, amp_norm, std::move(defect)};
}

namespace {

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);  // descending Legendre roots -> ascending on [0,1]
    weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
}

}  // namespace

IntegralCheck integral_representation_check(const WkbState& s0, double t,
                                            const GrenierParams& p,
                                            const NormParams& np,
                                            int nodes_per_axis) {
  if (nodes_per_axis < 1)
    throw ParameterError("integral_representation_check: need >= 1 node");
  const Grid& g = s0.amplitude.grid();

  std::vector<double> xs, ws;
  gauss_legendre_01(nodes_per_axis, xs, ws);

  std::vector<double> acc_phase(g.size(), 0.0);
  std::vector<Complex> acc_amp(g.size(), Complex(0.0));

  for (int i = 0; i < nodes_per_axis; ++i) {
    const double tau1 = t * xs[i];
    // Per-tau1 bases: E_A(tau1, s0), Z^{tau1} s0, and the exact flow from
    // the latter over the remaining time.
    const WkbState v1 = flow_X(s0, tau1, p);
    const WkbState tv2 = flow_Y(v1, tau1, p);
    Trajectory base(g);
    grenier_reference(tv2, t - tau1, p, 1e-11, &base);

    for (int j = 0; j < nodes_per_axis; ++j) {
      const double tau2 = tau1 * xs[j];
      const WkbState v2 = flow_Y(v1, tau2, p);
      // [B, A] = -[A, B]
      OperatorOutput w = commutator_AB(v2, p);
      for (double& v : w.phase.mutate_values()) v = -v;
      for (Complex& v : w.amplitude.mutate_values()) v = -v;

      const PhaseAmpPair w4 = d2_gauge_flow(v1, w, tau1 - tau2, p);
      const PhaseAmpPair w5 = linearized_flow(base, w4, t - tau1, p);

      // Simplex jacobian tau1 * t times the tensor weights.
      const double weight = ws[i] * ws[j] * tau1 * t;
      for (std::size_t m = 0; m < g.size(); ++m) {
        acc_phase[m] += weight * w5.phase.values()[m];
        acc_amp[m] += weight * w5.amplitude.values()[m];
      }
    }
  }

  const LocalErrorNorms measured = measure_local_error(s0, t, p, np, 1e-11);

  const NormParams at = np.at_time(t);
  std::vector<double> diff_phase(g.size());
  std::vector<Complex> diff_amp(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    diff_phase[m] = acc_phase[m] - measured.defect.phase.values()[m];
    diff_amp[m] = acc_amp[m] - measured.defect.amplitude.values()[m];
  }

  IntegralCheck out;
  out.nodes_per_axis = nodes_per_axis;
  out.defect_norm =
      analytic_norm(RealField(g, std::move(diff_phase)),
                    at.with_ell(np.ell - 3.0)) +
      analytic_norm(ComplexField::from_values(g, std::move(diff_amp)),
                    at.with_ell(np.ell - 4.0));
  out.integral_norm =
      analytic_norm(RealField(g, std::move(acc_phase)),
                    at.with_ell(np.ell - 3.0)) +
      analytic_norm(ComplexField::from_values(g, std::move(acc_amp)),
                    at.with_ell(np.ell - 4.0));
  out.local_norm = measured.phase_norm + measured.amp_norm;
  return out;
}

double local_wave_error(const WkbState& s0, double t, const GrenierParams& p,
                        double reference_tol) {
  const WkbState split = lie_trotter_wkb(s0, t, p);
  const WkbState exact = grenier_reference(s0, t, p, reference_tol).state;
  return l2_distance(assemble_wave(split, p.eps), assemble_wave(exact, p.eps));
}

}  // namespace wkbsplit
