#include "wkbsplit/wkb_flows.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

namespace {

// Spectral-space integration state (phi kept as the spectrum of a real field).
struct Spec {
  std::vector<Complex> phi, a;
};

Spec to_spec(const WkbState& s) {
  return Spec{complexify(s.phase).spectrum(), s.amplitude.spectrum()};
}

WkbState make_state(const Grid& g, const Spec& y, double time) {
  RealField phase = real_part_checked(
      ComplexField::from_spectrum(g, y.phi), 1e-12, "phase update");
  return WkbState(std::move(phase), ComplexField::from_spectrum(g, y.a), time);
}

Spec axpy(const Spec& y, double h, const Spec& d) {
  Spec out = y;
  for (std::size_t i = 0; i < out.phi.size(); ++i) {
    out.phi[i] += h * d.phi[i];
    out.a[i] += h * d.a[i];
  }
  return out;
}

void rk4_combine(Spec& y, double h, const Spec& s1, const Spec& s2,
                 const Spec& s3, const Spec& s4) {
  const double w = h / 6.0;
  for (std::size_t i = 0; i < y.phi.size(); ++i) {
    y.phi[i] += w * (s1.phi[i] + 2.0 * s2.phi[i] + 2.0 * s3.phi[i] + s4.phi[i]);
    y.a[i] += w * (s1.a[i] + 2.0 * s2.a[i] + 2.0 * s3.a[i] + s4.a[i]);
  }
}

double spec_l2_diff(const Grid& g, const Spec& x, const Spec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.phi.size(); ++i) {
    s += std::norm(x.phi[i] - y.phi[i]);
    s += std::norm(x.a[i] - y.a[i]);
  }
  return std::sqrt(s * g.spectral_cell());
}

std::vector<double> real_checked_vec(const std::vector<Complex>& v,
                                     const char* what) {
  std::vector<double> out(v.size());
  double residue = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    residue = std::max(residue, std::abs(v[i].imag()));
    out[i] = v[i].real();
  }
  if (residue > 1e-12)
    throw Error(std::string(what) + ": imaginary residue " +
                std::to_string(residue) + " exceeds 1e-12");
  return out;
}

double pow_sigma(double r2, int sigma) {
  double p = 1.0;
  for (int s = 0; s < sigma; ++s) p *= r2;
  return p;  // r2^sigma
}

// dt a gains i (eps/2) lap a, exact in spectral space and never filtered.
void add_dispersion(const Grid& g, double eps, const std::vector<Complex>& a,
                    std::vector<Complex>& rhs_a) {
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>& k) {
    rhs_a[flat] += Complex(0.0, -0.5 * eps * (k[0] * k[0] + k[1] * k[1])) *
                   a[flat];
  });
}

// Right-hand side of the coupled phase-amplitude system; include_gauge
// toggles the -lambda |a|^{2 sigma} term (off for the split sub-flow X).
Spec rhs_phase_amp(const Grid& g, const GrenierParams& p, const Spec& y,
                   bool include_gauge) {
  const int d = g.dim();
  const std::size_t n = g.size();

  std::array<std::vector<double>, 2> phi_x;
  std::array<std::vector<Complex>, 2> a_x;
  for (int ax = 0; ax < d; ++ax) {
    phi_x[ax] = real_checked_vec(g.inverse(gradient_spectrum(g, y.phi, ax)),
                                 "flow: grad phi");
    a_x[ax] = g.inverse(gradient_spectrum(g, y.a, ax));
  }
  const std::vector<double> phi_lap =
      real_checked_vec(g.inverse(laplacian_spectrum(g, y.phi)), "flow: lap phi");
  const std::vector<Complex> a_phys = g.inverse(y.a);

  std::vector<Complex> rhs_phi(n), rhs_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    double grad_sq = 0.0;
    Complex transport(0.0);
    for (int ax = 0; ax < d; ++ax) {
      grad_sq += phi_x[ax][i] * phi_x[ax][i];
      transport += phi_x[ax][i] * a_x[ax][i];
    }
    double rp = -0.5 * grad_sq;
    if (include_gauge)
      rp -= p.lambda * pow_sigma(std::norm(a_phys[i]), p.sigma);
    rhs_phi[i] = Complex(rp, 0.0);
    rhs_a[i] = -transport - 0.5 * a_phys[i] * phi_lap[i];
  }
  Spec out{g.forward(rhs_phi), g.forward(rhs_a)};
  if (p.dealias) {
    dealias_spectrum(g, out.phi);
    dealias_spectrum(g, out.a);
  }
  add_dispersion(g, p.eps, y.a, out.a);
  return out;
}

double min_hessian_eigenvalue(const Grid& g, const std::vector<Complex>& phi_hat) {
  double m = std::numeric_limits<double>::infinity();
  if (g.dim() == 1) {
    const auto xx = g.inverse(laplacian_spectrum(g, phi_hat));
    for (const Complex& v : xx) m = std::min(m, v.real());
    return m;
  }
  const auto d0 = gradient_spectrum(g, phi_hat, 0);
  const auto d1 = gradient_spectrum(g, phi_hat, 1);
  const auto h00 = g.inverse(gradient_spectrum(g, d0, 0));
  const auto h01 = g.inverse(gradient_spectrum(g, d0, 1));
  const auto h11 = g.inverse(gradient_spectrum(g, d1, 1));
  for (std::size_t i = 0; i < h00.size(); ++i) {
    const double tr = h00[i].real() + h11[i].real();
    const double df = h00[i].real() - h11[i].real();
    const double disc = std::sqrt(df * df + 4.0 * h01[i].real() * h01[i].real());
    m = std::min(m, 0.5 * (tr - disc));
  }
  return m;
}

// Explicit-stability ceiling: the stiffest retained mode of the dispersion
// term plus the transport rate must fit in the RK4 stability region.
double stability_substep(const Grid& g, const GrenierParams& p,
                         const Spec& y0) {
  const double kmax = g.max_wavenumber();
  double vmax = 0.0, lapmax = 0.0;
  for (int ax = 0; ax < g.dim(); ++ax) {
    const auto gx = g.inverse(gradient_spectrum(g, y0.phi, ax));
    for (const Complex& v : gx) vmax = std::max(vmax, std::abs(v.real()));
  }
  const auto lp = g.inverse(laplacian_spectrum(g, y0.phi));
  for (const Complex& v : lp) lapmax = std::max(lapmax, std::abs(v.real()));
  const double rate = 0.5 * p.eps * kmax * kmax + 1.5 * (vmax + 0.05) * kmax +
                      0.75 * lapmax + std::abs(p.lambda);
  return 2.0 / rate;
}

long substep_count(double duration, double ceiling, double stab) {
  const double h = std::min(ceiling, stab);
  return std::max<long>(1, static_cast<long>(std::ceil(duration / h)));
}

using RhsFn = std::function<Spec(double, const Spec&)>;
using MonitorFn = std::function<void(double, const Spec&)>;

Spec rk4_march(double t0, double duration, long n, Spec y, const RhsFn& rhs,
               const MonitorFn& monitor, Trajectory* rec) {
  const double h = duration / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    if (monitor) monitor(t - t0, y);
    Spec s1 = rhs(t, y);
    if (rec) rec->append(t, y.phi, y.a, s1.phi, s1.a);
    Spec s2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, s1));
    Spec s3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, s2));
    Spec s4 = rhs(t + h, axpy(y, h, s3));
    rk4_combine(y, h, s1, s2, s3, s4);
  }
  if (monitor) monitor(duration, y);
  if (rec) {
    Spec sf = rhs(t0 + duration, y);
    rec->append(t0 + duration, y.phi, y.a, sf.phi, sf.a);
  }
  return y;
}

}  // namespace

void GrenierParams::validate() const {
  if (!(eps > 0.0) || eps > 1.0)
    throw ParameterError("GrenierParams: eps must lie in (0, 1]");
  if (sigma < 1) throw ParameterError("GrenierParams: sigma must be >= 1");
  if (!(substep_ceiling > 0.0))
    throw ParameterError("GrenierParams: substep ceiling must be positive");
}

WkbState flow_Y(const WkbState& s, double t, const GrenierParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw ParameterError("flow_Y: t must be >= 0");
  const auto amp = s.amplitude.values();
  std::vector<double> phi(s.phase.values().begin(), s.phase.values().end());
  const double c = t * p.lambda;
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] -= c * pow_sigma(std::norm(amp[i]), p.sigma);
  return WkbState(RealField(s.phase.grid(), std::move(phi)), s.amplitude,
                  s.time + t);
}

WkbState flow_X(const WkbState& s, double t, const GrenierParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw ParameterError("flow_X: t must be >= 0");
  if (t == 0.0) return s;
  const Grid& g = s.amplitude.grid();
  Spec y = to_spec(s);

  const double ceiling = std::min(t / 8.0, p.substep_ceiling);
  const long n = substep_count(t, ceiling, stability_substep(g, p, y));

  MonitorFn monitor = [&g, &p, t, base_time = s.time](double elapsed,
                                                      const Spec& yy) {
    const double m = min_hessian_eigenvalue(g, yy.phi);
    const double remaining = t - elapsed;
    if (1.0 + remaining * m <= p.caustic_threshold) {
      const double to_crit =
          m < 0.0 ? (1.0 - p.caustic_threshold) / (-m) : remaining;
      throw HorizonError(
          "flow_X: caustic monitor tripped (min eigenvalue " +
              std::to_string(m) + ")",
          base_time + elapsed + to_crit);
    }
  };
  RhsFn rhs = [&g, &p](double, const Spec& yy) {
    return rhs_phase_amp(g, p, yy, /*include_gauge=*/false);
  };
  Spec out = rk4_march(s.time, t, n, std::move(y), rhs, monitor, nullptr);
  return make_state(g, out, s.time + t);
}

WkbState lie_trotter_wkb(const WkbState& s, double dt, const GrenierParams& p) {
  if (!(dt > 0.0)) throw ParameterError("lie_trotter_wkb: dt must be positive");
  WkbState out = flow_Y(flow_X(s, dt, p), dt, p);
  out.time = s.time + dt;
  return out;
}

void Trajectory::append(double t, std::vector<Complex> phi_hat,
                        std::vector<Complex> a_hat,
                        std::vector<Complex> phi_dot,
                        std::vector<Complex> a_dot) {
  if (!times_.empty() && t <= times_.back())
    throw ParameterError("Trajectory: knot times must increase");
  times_.push_back(t);
  phi_.push_back(std::move(phi_hat));
  a_.push_back(std::move(a_hat));
  phi_dot_.push_back(std::move(phi_dot));
  a_dot_.push_back(std::move(a_dot));
}

// Cubic Hermite interpolation between the bracketing knots.
void Trajectory::eval(double t, std::vector<Complex>& phi_hat,
                      std::vector<Complex>& a_hat) const {
  if (times_.empty()) throw ParameterError("Trajectory: empty");
  if (times_.size() == 1 || t <= times_.front()) {
    phi_hat = phi_.front();
    a_hat = a_.front();
    return;
  }
  if (t >= times_.back()) {
    phi_hat = phi_.back();
    a_hat = a_.back();
    return;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double dt = times_[hi] - times_[lo];
  const double s = (t - times_[lo]) / dt;
  const double s2 = s * s, s3 = s2 * s;
  const double c00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double c10 = (s3 - 2.0 * s2 + s) * dt;
  const double c01 = -2.0 * s3 + 3.0 * s2;
  const double c11 = (s3 - s2) * dt;

  const std::size_t n = phi_[lo].size();
  phi_hat.resize(n);
  a_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi_hat[i] = c00 * phi_[lo][i] + c10 * phi_dot_[lo][i] +
                 c01 * phi_[hi][i] + c11 * phi_dot_[hi][i];
    a_hat[i] = c00 * a_[lo][i] + c10 * a_dot_[lo][i] + c01 * a_[hi][i] +
               c11 * a_dot_[hi][i];
  }
}

WkbState Trajectory::state(std::size_t index) const {
  return make_state(*grid_, Spec{phi_[index], a_[index]}, times_[index]);
}

WkbReference grenier_reference(const WkbState& s0, double t,
                               const GrenierParams& p, double tolerance,
                               Trajectory* record) {
  p.validate();
  if (!(t >= 0.0)) throw ParameterError("grenier_reference: t must be >= 0");
  const Grid& g = s0.amplitude.grid();
  Spec y0 = to_spec(s0);
  if (t == 0.0) {
    if (record) {
      Spec d = rhs_phase_amp(g, p, y0, true);
      record->append(s0.time, y0.phi, y0.a, d.phi, d.a);
    }
    return WkbReference{s0, 0.0, 0};
  }

  RhsFn rhs = [&g, &p](double, const Spec& yy) {
    return rhs_phase_amp(g, p, yy, /*include_gauge=*/true);
  };
  long n = std::max<long>(
      16, substep_count(t, p.substep_ceiling, stability_substep(g, p, y0)));
  Spec coarse = rk4_march(s0.time, t, n, y0, rhs, nullptr, nullptr);
  constexpr int kMaxDoublings = 12;
  double prev_cert = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kMaxDoublings; ++i) {
    n *= 2;
    Spec fine = rk4_march(s0.time, t, n, y0, rhs, nullptr, nullptr);
    const double cert = spec_l2_diff(g, coarse, fine);
    if (cert < tolerance) {
      if (record)
        rk4_march(s0.time, t, n, y0, rhs, nullptr, record);
      return WkbReference{make_state(g, fine, s0.time + t), cert, n};
    }
    if (i >= 2 && cert > 0.5 * prev_cert) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "grenier_reference: certificate stalled at %.3e "
                    "(tolerance %.3e, %ld substeps)",
                    cert, tolerance, n);
      throw ReferenceQualityError(msg);
    }
    prev_cert = cert;
    coarse = std::move(fine);
  }
  char msg[128];
  std::snprintf(msg, sizeof msg,
                "grenier_reference: certificate did not reach %.3e after %ld "
                "substeps",
                tolerance, n);
  throw ReferenceQualityError(msg);
}

namespace {

// Distance between two stage trajectories: sup over shared sample times of
// ||dphi||_{H^{ell+1}_{rho}} + ||da||_{H^ell_rho} under np's schedule.
double stage_distance(const Grid& g, const Trajectory& a, const Trajectory& b,
                      double t0, double duration, const NormParams& np) {
  constexpr int kSamples = 17;
  std::vector<Complex> pa, aa, pb, ab;
  double sup = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double tau = duration * i / (kSamples - 1);
    a.eval(t0 + tau, pa, aa);
    b.eval(t0 + tau, pb, ab);
    for (std::size_t j = 0; j < pa.size(); ++j) {
      pa[j] -= pb[j];
      aa[j] -= ab[j];
    }
    const NormParams at = np.at_time(tau);
    const double d =
        std::sqrt(norm_sq_of_spectrum(g, pa, at.with_ell(np.ell + 1.0))) +
        std::sqrt(norm_sq_of_spectrum(g, aa, at));
    sup = std::max(sup, d);
  }
  return sup;
}

}  // namespace

IterationReport grenier_iterative(const WkbState& s0, double t,
                                  const GrenierParams& p, int stages,
                                  const NormParams& np, double floor) {
  p.validate();
  if (stages < 1) throw ParameterError("grenier_iterative: need >= 1 stage");
  if (!(t > 0.0)) throw ParameterError("grenier_iterative: t must be positive");
  const Grid& g = s0.amplitude.grid();
  const Spec y0 = to_spec(s0);
  const long n = std::max<long>(
      16, substep_count(t, p.substep_ceiling, stability_substep(g, p, y0)));

  // Stage 0: the constant-in-time trajectory (phi0, a0).
  const std::vector<Complex> zero(g.size(), Complex(0.0));
  Trajectory prev(g);
  prev.append(s0.time, y0.phi, y0.a, zero, zero);
  prev.append(s0.time + t, y0.phi, y0.a, zero, zero);

  IterationReport report{s0, {}, false, 0};
  for (int j = 1; j <= stages; ++j) {
    RhsFn rhs = [&g, &p, &prev](double tau, const Spec& yy) {
      std::vector<Complex> cphi, ca;
      prev.eval(tau, cphi, ca);
      const int d = g.dim();
      std::array<std::vector<double>, 2> coeff_x;
      for (int ax = 0; ax < d; ++ax)
        coeff_x[ax] = real_checked_vec(
            g.inverse(gradient_spectrum(g, cphi, ax)), "stage: grad phi_j");
      const std::vector<double> coeff_lap = real_checked_vec(
          g.inverse(laplacian_spectrum(g, cphi)), "stage: lap phi_j");
      const std::vector<Complex> coeff_a = g.inverse(ca);

      std::array<std::vector<double>, 2> y_phi_x;
      std::array<std::vector<Complex>, 2> y_a_x;
      for (int ax = 0; ax < d; ++ax) {
        y_phi_x[ax] = real_checked_vec(
            g.inverse(gradient_spectrum(g, yy.phi, ax)), "stage: grad phi");
        y_a_x[ax] = g.inverse(gradient_spectrum(g, yy.a, ax));
      }
      const std::vector<Complex> y_a = g.inverse(yy.a);

      const std::size_t m = g.size();
      std::vector<Complex> rhs_phi(m), rhs_a(m);
      for (std::size_t i = 0; i < m; ++i) {
        double tp = 0.0;
        Complex ta(0.0);
        for (int ax = 0; ax < d; ++ax) {
          tp += coeff_x[ax][i] * y_phi_x[ax][i];
          ta += coeff_x[ax][i] * y_a_x[ax][i];
        }
        rhs_phi[i] = Complex(
            -0.5 * tp - p.lambda * pow_sigma(std::norm(coeff_a[i]), p.sigma),
            0.0);
        rhs_a[i] = -ta - 0.5 * y_a[i] * coeff_lap[i];
      }
      Spec out{g.forward(rhs_phi), g.forward(rhs_a)};
      if (p.dealias) {
        dealias_spectrum(g, out.phi);
        dealias_spectrum(g, out.a);
      }
      add_dispersion(g, p.eps, yy.a, out.a);
      return out;
    };

    Trajectory cur(g);
    Spec yj = rk4_march(s0.time, t, n, y0, rhs, nullptr, &cur);
    report.state = make_state(g, yj, s0.time + t);
    report.stages_run = j;
    report.stage_differences.push_back(
        stage_distance(g, prev, cur, s0.time, t, np));
    prev = std::move(cur);
    if (report.stage_differences.back() < floor) break;
  }

  bool ratios_ok = true;
  for (std::size_t i = 1; i < report.stage_differences.size(); ++i) {
    if (report.stage_differences[i] >=
        0.9 * report.stage_differences[i - 1]) {
      ratios_ok = false;
      break;
    }
  }
  report.contracted =
      ratios_ok && !report.stage_differences.empty() &&
      report.stage_differences.back() < floor;
  return report;
}

PhaseAmpPair linearized_flow(const Trajectory& base, const PhaseAmpPair& init,
                             double t, const GrenierParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw ParameterError("linearized_flow: t must be >= 0");
  if (t > base.end_time() - base.start_time() + 1e-12)
    throw ParameterError("linearized_flow: base trajectory too short");
  const Grid& g = base.grid();
  check_same_grid(g, init.amplitude.grid(), "linearized_flow");
  Spec y{complexify(init.phase).spectrum(), init.amplitude.spectrum()};
  if (t == 0.0) return init;

  std::vector<Complex> bphi, ba;
  base.eval(base.start_time(), bphi, ba);
  const long n = std::max<long>(
      8, substep_count(t, p.substep_ceiling,
                       stability_substep(g, p, Spec{bphi, ba})));

  RhsFn rhs = [&g, &p, &base](double tau, const Spec& yy) {
    std::vector<Complex> cphi, ca;
    base.eval(tau, cphi, ca);
    const int d = g.dim();
    std::array<std::vector<double>, 2> phi_x;
    std::array<std::vector<Complex>, 2> a_x;
    for (int ax = 0; ax < d; ++ax) {
      phi_x[ax] = real_checked_vec(g.inverse(gradient_spectrum(g, cphi, ax)),
                                   "linearized: grad phi");
      a_x[ax] = g.inverse(gradient_spectrum(g, ca, ax));
    }
    const std::vector<double> phi_lap = real_checked_vec(
        g.inverse(laplacian_spectrum(g, cphi)), "linearized: lap phi");
    const std::vector<Complex> a_phys = g.inverse(ca);

    std::array<std::vector<double>, 2> vphi_x;
    std::array<std::vector<Complex>, 2> b_x;
    for (int ax = 0; ax < d; ++ax) {
      vphi_x[ax] = real_checked_vec(
          g.inverse(gradient_spectrum(g, yy.phi, ax)), "linearized: grad vphi");
      b_x[ax] = g.inverse(gradient_spectrum(g, yy.a, ax));
    }
    const std::vector<double> vphi_lap = real_checked_vec(
        g.inverse(laplacian_spectrum(g, yy.phi)), "linearized: lap vphi");
    const std::vector<Complex> b_phys = g.inverse(yy.a);

    const std::size_t m = g.size();
    std::vector<Complex> rhs_phi(m), rhs_a(m);
    for (std::size_t i = 0; i < m; ++i) {
      double tp = 0.0;
      Complex tb(0.0), tba(0.0);
      for (int ax = 0; ax < d; ++ax) {
        tp += phi_x[ax][i] * vphi_x[ax][i];
        tb += phi_x[ax][i] * b_x[ax][i];
        tba += vphi_x[ax][i] * a_x[ax][i];
      }
      const double coupling =
          2.0 * p.sigma * p.lambda *
          pow_sigma(std::norm(a_phys[i]), p.sigma - 1) *
          std::real(std::conj(a_phys[i]) * b_phys[i]);
      rhs_phi[i] = Complex(-tp - coupling, 0.0);
      rhs_a[i] = -tb - tba -
                 0.5 * (b_phys[i] * phi_lap[i] + a_phys[i] * vphi_lap[i]);
    }
    Spec out{g.forward(rhs_phi), g.forward(rhs_a)};
    if (p.dealias) {
      dealias_spectrum(g, out.phi);
      dealias_spectrum(g, out.a);
    }
    add_dispersion(g, p.eps, yy.a, out.a);
    return out;
  };

  Spec out = rk4_march(base.start_time(), t, n, std::move(y), rhs, nullptr,
                       nullptr);
  return PhaseAmpPair{
      real_part_checked(ComplexField::from_spectrum(g, out.phi), 1e-12,
                        "linearized phase"),
      ComplexField::from_spectrum(g, out.a)};
}

}  // namespace wkbsplit
