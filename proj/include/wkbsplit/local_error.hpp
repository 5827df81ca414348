#pragma once

#include "wkbsplit/analytic_norms.hpp"
#include "wkbsplit/wkb_flows.hpp"
#include "wkbsplit/wkb_state.hpp"

namespace wkbsplit {

// Generators of the two split sub-flows acting on (phi, a); the phase
// component is real to rounding.
using OperatorOutput = PhaseAmpPair;

// A(phi, a) = ( -|grad phi|^2 / 2,
//               -grad phi . grad a - a lap phi / 2 + i eps lap a / 2 )
OperatorOutput apply_A(const WkbState& s, const GrenierParams& p);

// B(phi, a) = ( -lambda |a|^{2 sigma}, 0 )
OperatorOutput apply_B(const WkbState& s, const GrenierParams& p);

// [A, B] = A'B - B'A, explicitly
//   phase: grad phi . grad f(|a|^2) - div(|a|^2 grad phi + eps Im(conj(a) grad a)) f'(|a|^2)
//   amp:   grad a . grad f(|a|^2) + a lap f(|a|^2) / 2
// with f(r) = lambda r^sigma.
OperatorOutput commutator_AB(const WkbState& s, const GrenierParams& p);

// Derivative of the gauge flow with respect to its initial point:
// (vphi, b) -> (vphi - 2 sigma lambda t |a|^{2s-2} Re(conj(a) b), b).
PhaseAmpPair d2_gauge_flow(const WkbState& base, const PhaseAmpPair& pert,
                           double t, const GrenierParams& p);

// Single-step splitting defect Z^t s0 - S^t s0, measured in the analytic
// norms at the regularity-loss indices (ell - 3 for the phase, ell - 4 for
// the amplitude) with width rho(t).
struct LocalErrorNorms {
  double phase_norm = 0.0;  // || Psi(t) ||_{H^{ell-3}_{rho(t)}}
  double amp_norm = 0.0;    // || A(t) ||_{H^{ell-4}_{rho(t)}}
  PhaseAmpPair defect;
};

LocalErrorNorms measure_local_error(const WkbState& s0, double t,
                                    const GrenierParams& p,
                                    const NormParams& np,
                                    double reference_tol = 1e-11);

// Quadrature evaluation of the exact integral representation of the local
// error over the simplex 0 <= tau2 <= tau1 <= t (tensorized Gauss-Legendre
// nodes mapped to the triangle), compared against the measured defect.
struct IntegralCheck {
  int nodes_per_axis = 0;
  double defect_norm = 0.0;    // ||integral - measured|| (phase + amp norms)
  double integral_norm = 0.0;  // same norms of the quadrature value
  double local_norm = 0.0;     // same norms of the measured local error
};

IntegralCheck integral_representation_check(const WkbState& s0, double t,
                                            const GrenierParams& p,
                                            const NormParams& np,
                                            int nodes_per_axis);

// L^2 distance of the assembled waves after one split step vs the reference.
double local_wave_error(const WkbState& s0, double t, const GrenierParams& p,
                        double reference_tol = 1e-11);

}  // namespace wkbsplit
