#pragma once

#include <span>
#include <vector>

#include "wkbsplit/analytic_norms.hpp"
#include "wkbsplit/wkb_state.hpp"

namespace wkbsplit {

// Parameters of the phase-amplitude (Grenier) dynamics and its split flows.
struct GrenierParams {
  double eps = 1.0;
  double lambda = 0.0;
  int sigma = 1;
  // Ceiling on the RK4 substep for PDE integration; flow_X additionally
  // caps its substep at t/8, and every integration respects the explicit
  // stability limit of the stiffest retained mode.
  double substep_ceiling = 1e-3;
  bool dealias = true;
  // Caustic monitor threshold on min_x (1 + t_remaining * lambda_min(D^2 phi)).
  double caustic_threshold = 0.1;

  void validate() const;
};

// Exact gauge flow: phi <- phi - t lambda |a|^{2 sigma}, a untouched.
WkbState flow_Y(const WkbState& s, double t, const GrenierParams& p);

// Eikonal + transport-Schroedinger flow (free flight at the WKB level):
//   dt phi + |grad phi|^2 / 2 = 0
//   dt a + grad phi . grad a + a lap phi / 2 = i eps lap a / 2
// integrated spectrally with RK4 substeps.  Throws HorizonError when the
// caustic monitor trips.
WkbState flow_X(const WkbState& s, double t, const GrenierParams& p);

// One Lie-Trotter step at the WKB level: flow_Y(flow_X(s, dt), dt).
WkbState lie_trotter_wkb(const WkbState& s, double dt, const GrenierParams& p);

// Stored phase-amplitude trajectory: spectra and their time derivatives at
// substep knots, interpolated with cubic Hermite polynomials.  Used as the
// frozen-coefficient source for linearized and Picard-stage solves.
class Trajectory {
 public:
  explicit Trajectory(const Grid& g) : grid_(&g) {}

  void append(double t, std::vector<Complex> phi_hat,
              std::vector<Complex> a_hat, std::vector<Complex> phi_dot,
              std::vector<Complex> a_dot);

  const Grid& grid() const { return *grid_; }
  std::size_t samples() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  // Interpolated coefficient spectra at model time t.
  void eval(double t, std::vector<Complex>& phi_hat,
            std::vector<Complex>& a_hat) const;
  // Reconstructs the stored sample as a field-level state.
  WkbState state(std::size_t index) const;

 private:
  const Grid* grid_;
  std::vector<double> times_;
  std::vector<std::vector<Complex>> phi_, a_, phi_dot_, a_dot_;
};

// Fine-step RK4 integration of the full coupled system
//   dt phi + |grad phi|^2 / 2 + lambda |a|^{2 sigma} = 0
//   dt a + grad phi . grad a + a lap phi / 2 = i eps lap a / 2
// doubling substeps until the Richardson self-certificate passes.
struct WkbReference {
  WkbState state;
  double certificate = 0.0;
  long substeps = 0;
};

WkbReference grenier_reference(const WkbState& s0, double t,
                               const GrenierParams& p, double tolerance = 1e-9,
                               Trajectory* record = nullptr);

// Picard-type iteration: stage j+1 solves the linear transport/Schroedinger
// pair with coefficients frozen from stage j, initialized with the constant
// trajectory (phi0, a0).  Stage distances are measured in the ell-indexed
// analytic norms under np's schedule.
struct IterationReport {
  WkbState state;
  std::vector<double> stage_differences;
  bool contracted = false;  // ratios stayed below 0.9 until the floor
  int stages_run = 0;
};

IterationReport grenier_iterative(const WkbState& s0, double t,
                                  const GrenierParams& p, int stages,
                                  const NormParams& np, double floor = 1e-8);

// Linearized flow along a stored base trajectory:
//   dt vphi + grad phi . grad vphi + 2 sigma lambda |a|^{2s-2} Re(conj(a) b) = 0
//   dt b + grad phi . grad b + grad vphi . grad a
//        + (b lap phi + a lap vphi)/2 = i eps lap b / 2.
PhaseAmpPair linearized_flow(const Trajectory& base, const PhaseAmpPair& init,
                             double t, const GrenierParams& p);

}  // namespace wkbsplit
