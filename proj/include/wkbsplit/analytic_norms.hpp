#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wkbsplit/field.hpp"
#include "wkbsplit/wkb_state.hpp"

namespace wkbsplit {

// Configuration of the analytic (Gevrey nu=1) norm family H^ell_rho with
// exponential weight w(xi) = exp(rho max(1,|xi|)^nu) and the decreasing
// schedule rho(t) = M0 - Mrate t.
//
// The default weight is the literal split (|xi|^ell above 1, constant
// below); angle_bracket_weight switches to the <xi>-equivalent variant.
struct NormParams {
  double ell = 0.0;
  double nu = 1.0;
  double rho = 0.0;
  double M0 = 0.0;
  double Mrate = 0.0;
  bool angle_bracket_weight = false;

  // rho(t) on the schedule; asserts positivity of the width.
  double rho_at(double t) const;
  NormParams at_time(double t) const;
  NormParams with_ell(double l) const;
  NormParams with_rho(double r) const;
};

struct NormValue {
  double value = 0.0;
  bool tail_warning = false;
};

// ||psi||_{H^ell_rho}; quadrature of the weighted spectrum over the lattice.
double analytic_norm(const ComplexField& f, const NormParams& np);
double analytic_norm(const RealField& f, const NormParams& np);
NormValue analytic_norm_checked(const ComplexField& f, const NormParams& np);

// Same quadrature on a raw spectrum (no tail check); returns the square.
double norm_sq_of_spectrum(const Grid& g, std::span<const Complex> spec,
                           const NormParams& np);
// Re <f, g>_{H^ell_rho} on raw spectra.
double weighted_inner(const Grid& g, std::span<const Complex> f,
                      std::span<const Complex> g2, const NormParams& np);

// Sampled norms of a (phi, a) trajectory under the rho(t) schedule:
// ||phi||_{H^{ell+1}}, ||a||_{H^ell}, the half-index-up squared norms that
// feed the triple norm, and the running integrals int_0^t |rhodot| ||.||^2.
struct NormTrace {
  std::vector<double> times;
  std::vector<double> phase_norm, amp_norm;
  std::vector<double> phase_halfup_sq, amp_halfup_sq;
  std::vector<double> phase_integral, amp_integral;
  NormParams params;
};

NormTrace build_norm_trace(std::span<const double> times,
                           std::span<const WkbState> states,
                           const NormParams& np);

// Triple norm of one sampled component: the max of the sup of the squared
// norms and 2 int |rhodot| ||.||^2_{+1/2} (trapezoid), square-rooted.
double triple_norm(std::span<const double> times,
                   std::span<const double> norm_sq,
                   std::span<const double> halfup_sq, double Mrate);
double triple_norm_phase(const NormTrace& trace);
double triple_norm_amp(const NormTrace& trace);

// Residuals of d/dt ||psi||^2 = 2 rhodot ||psi||^2_{ell+nu/2} + 2 Re<psi, dt psi>
// on a snapshot sequence, all time derivatives centered-differenced.
struct EvolutionResidualReport {
  double max_residual = 0.0;
  std::vector<double> times;
  std::vector<double> residuals;
};

EvolutionResidualReport evolution_identity_check(
    std::span<const double> times, std::span<const ComplexField> snapshots,
    const NormParams& np);

// Budget verification against eq. (bound)-style estimates over a ladder of
// decay rates M.  Each row evaluates, on [0, min(t_end, 0.8 M0/M)]:
//   triple-norm budgets   |||phi|||^2 <= 2||phi0||^2 + ||a0||^{4 sigma},
//                         |||a|||^2   <= 2||a0||^2,
//   sup-norm budget       sup_t (||phi(t)|| + ||a(t)||) <= ||phi0|| + ||a0||.
struct BudgetRow {
  double M = 0.0;
  double horizon = 0.0;
  double phase_triple_sq = 0.0, phase_budget = 0.0;
  double amp_triple_sq = 0.0, amp_budget = 0.0;
  double sup_sum = 0.0, sup_budget = 0.0;
  bool triple_ok = false;
  bool sup_ok = false;
};

struct BudgetVerdict {
  std::vector<BudgetRow> rows;
  std::optional<double> accepted_triple;  // smallest passing M
  std::optional<double> accepted_sup;
};

BudgetVerdict budget_check(const WkbState& initial,
                           std::span<const double> times,
                           std::span<const WkbState> trajectory, double ell,
                           double M0, std::span<const double> ladder,
                           int sigma);

}  // namespace wkbsplit
