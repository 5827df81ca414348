#include "wkbsplit/analytic_norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

namespace {

constexpr double kExponentGuard = 700.0;

double weight_argument(double kabs, double nu) {
  return std::pow(std::max(1.0, kabs), nu);
}

// Squared weight <k>^{2l} e^{2 rho w(k)} (angle-bracket variant) or the
// literal split |k|^{2l} above 1 / plain below.
double squared_weight(double kabs, const NormParams& np) {
  if (np.angle_bracket_weight) {
    const double br = std::sqrt(1.0 + kabs * kabs);
    return std::pow(br, 2.0 * np.ell) * std::exp(2.0 * np.rho * std::pow(br, np.nu));
  }
  const double wexp = std::exp(2.0 * np.rho * weight_argument(kabs, np.nu));
  if (kabs > 1.0) return std::pow(kabs, 2.0 * np.ell) * wexp;
  return wexp;
}

void check_guard(const Grid& g, const NormParams& np) {
  const double kmax = g.max_wavenumber();
  const double arg = np.angle_bracket_weight
                         ? std::pow(std::sqrt(1.0 + kmax * kmax), np.nu)
                         : weight_argument(kmax, np.nu);
  if (np.rho * arg > kExponentGuard)
    throw NormOverflowError("analytic norm: rho * <k_max>^nu = " +
                            std::to_string(np.rho * arg) +
                            " exceeds the exponent guard 700");
}

}  // namespace

double NormParams::rho_at(double t) const {
  const double r = M0 - Mrate * t;
  if (!(r > 0.0))
    throw ParameterError("NormParams: rho(t) = M0 - M t is not positive at t = " +
                         std::to_string(t));
  return r;
}

NormParams NormParams::at_time(double t) const {
  NormParams np = *this;
  np.rho = rho_at(t);
  return np;
}

NormParams NormParams::with_ell(double l) const {
  NormParams np = *this;
  np.ell = l;
  return np;
}

NormParams NormParams::with_rho(double r) const {
  NormParams np = *this;
  np.rho = r;
  return np;
}

double norm_sq_of_spectrum(const Grid& g, std::span<const Complex> spec,
                           const NormParams& np) {
  if (spec.size() != g.size())
    throw GridMismatchError("norm_sq_of_spectrum: size mismatch");
  check_guard(g, np);
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>& k) {
    const double kabs = std::sqrt(k[0] * k[0] + k[1] * k[1]);
    sum += squared_weight(kabs, np) * std::norm(spec[flat]);
  });
  return sum * g.spectral_cell();
}

double weighted_inner(const Grid& g, std::span<const Complex> f,
                      std::span<const Complex> g2, const NormParams& np) {
  if (f.size() != g.size() || g2.size() != g.size())
    throw GridMismatchError("weighted_inner: size mismatch");
  check_guard(g, np);
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>& k) {
    const double kabs = std::sqrt(k[0] * k[0] + k[1] * k[1]);
    sum += squared_weight(kabs, np) * std::real(std::conj(f[flat]) * g2[flat]);
  });
  return sum * g.spectral_cell();
}

NormValue analytic_norm_checked(const ComplexField& f, const NormParams& np) {
  const Grid& g = f.grid();
  const auto& spec = f.spectrum();
  const double sq = norm_sq_of_spectrum(g, spec, np);

  // Tail check: weighted extreme-band coefficient against the norm.
  const double kmax = g.max_wavenumber();
  const int nyq = g.points_per_axis() / 2;
  double tail_sq = 0.0;
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>&) {
    const auto idx = g.axis_indices(flat);
    if (idx[0] == nyq || (g.dim() == 2 && idx[1] == nyq))
      tail_sq = std::max(tail_sq, std::norm(spec[flat]));
  });
  const double bracket = std::sqrt(1.0 + kmax * kmax);
  const bool warn =
      std::exp(2.0 * np.rho * std::pow(bracket, np.nu)) * tail_sq > 1e-20 * sq;
  return NormValue{std::sqrt(sq), warn};
}

double analytic_norm(const ComplexField& f, const NormParams& np) {
  return std::sqrt(norm_sq_of_spectrum(f.grid(), f.spectrum(), np));
}

double analytic_norm(const RealField& f, const NormParams& np) {
  return analytic_norm(complexify(f), np);
}

NormTrace build_norm_trace(std::span<const double> times,
                           std::span<const WkbState> states,
                           const NormParams& np) {
  if (times.size() != states.size() || times.empty())
    throw ParameterError("build_norm_trace: empty or mismatched trace");
  NormTrace tr;
  tr.params = np;
  const std::size_t m = times.size();
  tr.times.assign(times.begin(), times.end());
  tr.phase_norm.resize(m);
  tr.amp_norm.resize(m);
  tr.phase_halfup_sq.resize(m);
  tr.amp_halfup_sq.resize(m);
  tr.phase_integral.resize(m);
  tr.amp_integral.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    const Grid& g = states[i].amplitude.grid();
    const NormParams at = np.at_time(times[i]);
    const auto phi_hat = complexify(states[i].phase).spectrum();
    const auto& a_hat = states[i].amplitude.spectrum();
    tr.phase_norm[i] =
        std::sqrt(norm_sq_of_spectrum(g, phi_hat, at.with_ell(np.ell + 1.0)));
    tr.amp_norm[i] = std::sqrt(norm_sq_of_spectrum(g, a_hat, at));
    tr.phase_halfup_sq[i] =
        norm_sq_of_spectrum(g, phi_hat, at.with_ell(np.ell + 1.5));
    tr.amp_halfup_sq[i] =
        norm_sq_of_spectrum(g, a_hat, at.with_ell(np.ell + 0.5));
  }
  // Running trapezoid of |rhodot| ||.||^2_{+1/2}; nondecreasing by construction.
  tr.phase_integral[0] = tr.amp_integral[0] = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double h = tr.times[i] - tr.times[i - 1];
    const double rate = std::abs(np.Mrate);
    tr.phase_integral[i] =
        tr.phase_integral[i - 1] +
        0.5 * h * rate * (tr.phase_halfup_sq[i] + tr.phase_halfup_sq[i - 1]);
    tr.amp_integral[i] =
        tr.amp_integral[i - 1] +
        0.5 * h * rate * (tr.amp_halfup_sq[i] + tr.amp_halfup_sq[i - 1]);
  }
  return tr;
}

double triple_norm(std::span<const double> times,
                   std::span<const double> norm_sq,
                   std::span<const double> halfup_sq, double Mrate) {
  if (times.empty() || times.size() != norm_sq.size() ||
      times.size() != halfup_sq.size())
    throw ParameterError("triple_norm: empty or mismatched trace");
  double sup_sq = 0.0;
  for (double v : norm_sq) sup_sq = std::max(sup_sq, v);
  double integral = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    integral += 0.5 * (times[i] - times[i - 1]) * std::abs(Mrate) *
                (halfup_sq[i] + halfup_sq[i - 1]);
  return std::sqrt(std::max(sup_sq, 2.0 * integral));
}

double triple_norm_phase(const NormTrace& trace) {
  std::vector<double> sq(trace.phase_norm.size());
  for (std::size_t i = 0; i < sq.size(); ++i)
    sq[i] = trace.phase_norm[i] * trace.phase_norm[i];
  return triple_norm(trace.times, sq, trace.phase_halfup_sq,
                     trace.params.Mrate);
}

double triple_norm_amp(const NormTrace& trace) {
  std::vector<double> sq(trace.amp_norm.size());
  for (std::size_t i = 0; i < sq.size(); ++i)
    sq[i] = trace.amp_norm[i] * trace.amp_norm[i];
  return triple_norm(trace.times, sq, trace.amp_halfup_sq, trace.params.Mrate);
}

EvolutionResidualReport evolution_identity_check(
    std::span<const double> times, std::span<const ComplexField> snapshots,
    const NormParams& np) {
  if (times.size() != snapshots.size() || times.size() < 3)
    throw ParameterError("evolution_identity_check: need >= 3 snapshots");
  EvolutionResidualReport rep;
  const Grid& g = snapshots[0].grid();
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double span_t = times[i + 1] - times[i - 1];
    const NormParams lo = np.at_time(times[i - 1]);
    const NormParams hi = np.at_time(times[i + 1]);
    const NormParams mid = np.at_time(times[i]);
    const double d_norm_sq =
        (norm_sq_of_spectrum(g, snapshots[i + 1].spectrum(), hi) -
         norm_sq_of_spectrum(g, snapshots[i - 1].spectrum(), lo)) /
        span_t;

    const auto& sp = snapshots[i].spectrum();
    const auto& sp_next = snapshots[i + 1].spectrum();
    const auto& sp_prev = snapshots[i - 1].spectrum();
    std::vector<Complex> dpsi(sp.size());
    for (std::size_t j = 0; j < sp.size(); ++j)
      dpsi[j] = (sp_next[j] - sp_prev[j]) / span_t;

    const double weight_term =
        -2.0 * np.Mrate *
        norm_sq_of_spectrum(g, sp, mid.with_ell(np.ell + 0.5 * np.nu));
    const double flux_term = 2.0 * weighted_inner(g, sp, dpsi, mid);
    const double residual = d_norm_sq - weight_term - flux_term;
    rep.times.push_back(times[i]);
    rep.residuals.push_back(residual);
    rep.max_residual = std::max(rep.max_residual, std::abs(residual));
  }
  return rep;
}

BudgetVerdict budget_check(const WkbState& initial,
                           std::span<const double> times,
                           std::span<const WkbState> trajectory, double ell,
                           double M0, std::span<const double> ladder,
                           int sigma) {
  if (times.size() != trajectory.size() || times.empty())
    throw ParameterError("budget_check: empty or mismatched trajectory");
  const Grid& g = initial.amplitude.grid();

  // Spectra are reused across the whole ladder.
  std::vector<std::vector<Complex>> phi_hat, a_hat;
  phi_hat.reserve(times.size());
  a_hat.reserve(times.size());
  for (const WkbState& s : trajectory) {
    phi_hat.push_back(complexify(s.phase).spectrum());
    a_hat.push_back(s.amplitude.spectrum());
  }

  const NormParams at_init{ell, 1.0, M0, M0, 0.0, false};
  const double phi0_sq = norm_sq_of_spectrum(
      g, complexify(initial.phase).spectrum(), at_init.with_ell(ell + 1.0));
  const double a0_sq =
      norm_sq_of_spectrum(g, initial.amplitude.spectrum(), at_init);

  BudgetVerdict verdict;
  for (double M : ladder) {
    BudgetRow row;
    row.M = M;
    row.horizon = std::min(times.back(), 0.8 * M0 / M);

    std::vector<double> ts, phase_sq, amp_sq, phase_half, amp_half;
    double sup_sum = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] > row.horizon + 1e-14) break;
      NormParams np{ell, 1.0, 0.0, M0, M, false};
      np.rho = np.rho_at(times[i]);
      const double p_sq =
          norm_sq_of_spectrum(g, phi_hat[i], np.with_ell(ell + 1.0));
      const double a_sq = norm_sq_of_spectrum(g, a_hat[i], np);
      ts.push_back(times[i]);
      phase_sq.push_back(p_sq);
      amp_sq.push_back(a_sq);
      phase_half.push_back(
          norm_sq_of_spectrum(g, phi_hat[i], np.with_ell(ell + 1.5)));
      amp_half.push_back(
          norm_sq_of_spectrum(g, a_hat[i], np.with_ell(ell + 0.5)));
      sup_sum = std::max(sup_sum, std::sqrt(p_sq) + std::sqrt(a_sq));
    }
    if (ts.empty()) continue;

    const double phase_triple = triple_norm(ts, phase_sq, phase_half, M);
    const double amp_triple = triple_norm(ts, amp_sq, amp_half, M);
    row.phase_triple_sq = phase_triple * phase_triple;
    row.amp_triple_sq = amp_triple * amp_triple;
    row.phase_budget = 2.0 * phi0_sq + std::pow(a0_sq, 2.0 * sigma);
    row.amp_budget = 2.0 * a0_sq;
    row.sup_sum = sup_sum;
    row.sup_budget = std::sqrt(phi0_sq) + std::sqrt(a0_sq);
    row.triple_ok = row.phase_triple_sq <= row.phase_budget &&
                    row.amp_triple_sq <= row.amp_budget;
    row.sup_ok = row.sup_sum <= row.sup_budget;
    if (row.triple_ok && !verdict.accepted_triple) verdict.accepted_triple = M;
    if (row.sup_ok && !verdict.accepted_sup) verdict.accepted_sup = M;
    verdict.rows.push_back(row);
  }
  return verdict;
}

}  // namespace wkbsplit
