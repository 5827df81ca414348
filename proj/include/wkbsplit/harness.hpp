#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wkbsplit/analytic_norms.hpp"
#include "wkbsplit/config.hpp"
#include "wkbsplit/local_error.hpp"
#include "wkbsplit/slope_fit.hpp"
#include "wkbsplit/wkb_flows.hpp"

namespace wkbsplit {

// One (eps, dt) cell of the global convergence study, errors at t = T.
struct SweepRow {
  double eps = 0.0;
  double dt = 0.0;
  long n_steps = 0;
  double wave_l2 = 0.0;
  double density_l1 = 0.0, density_linf = 0.0;
  double current_l1 = 0.0, current_linf = 0.0;
  double phase_hk = 0.0, amp_hk = 0.0;
  bool reference_ok = true;
  std::string note;
};

struct EpsSlopes {
  double eps = 0.0;
  SlopeFit wkb;   // max(phase_hk, amp_hk) vs dt
  SlopeFit wave;  // wave_l2 vs dt
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<EpsSlopes> slopes;
  // Reference cross-validation (wave vs assembled WKB reference) per eps.
  std::vector<std::pair<double, double>> reference_agreement;
  // eps-uniformity of the observables at the dt closest to T/256.
  double uniformity_dt = 0.0;
  double density_ratio = 0.0;
  double current_ratio = 0.0;
  SlopeFit wave_vs_inv_eps;
  bool slopes_ok = false;
  bool observables_uniform_ok = false;
  bool wave_scaling_ok = false;
  std::string config_hash;
  std::uint64_t seed = 0;

  void write_csv(const std::filesystem::path& path) const;
  void write_json(const std::filesystem::path& path) const;
};

SweepReport run_global_convergence(const ExperimentConfig& cfg, int jobs = 1,
                                   std::uint64_t seed = 0);

// Local-error study: single-step defects across (eps, t) grids.
struct LocalErrorRow {
  double eps = 0.0;
  double t = 0.0;
  double phase_norm = 0.0, amp_norm = 0.0, total = 0.0;
  double wave_error = 0.0;
  std::string note;
};

struct LocalErrorPerEps {
  double eps = 0.0;
  SlopeFit wkb_slope;   // total vs t
  SlopeFit wave_slope;  // wave_error vs t
  double prefactor = 0.0;  // median of total / t^2
};

struct LocalErrorReport {
  std::vector<LocalErrorRow> rows;
  std::vector<LocalErrorRow> lambda0_rows;
  std::vector<LocalErrorPerEps> per_eps;
  double prefactor_ratio = 0.0;
  std::vector<IntegralCheck> integral_checks;  // node refinement at a pinned cell
  double integral_eps = 0.0, integral_t = 0.0;
  bool slopes_ok = false;
  bool prefactor_ok = false;
  bool lambda0_ok = false;
  bool integral_ok = false;
  std::string config_hash;
  std::uint64_t seed = 0;

  void write_csv(const std::filesystem::path& path) const;
  void write_json(const std::filesystem::path& path) const;
};

LocalErrorReport run_local_error_study(const ExperimentConfig& cfg,
                                       std::uint64_t seed = 0);

// Norm-budget tracking along exact and split trajectories.
struct NormTrackPerEps {
  double eps = 0.0;
  BudgetVerdict exact;
  BudgetVerdict split;
  std::string note;
};

struct NormTrackReport {
  std::vector<NormTrackPerEps> per_eps;
  double horizon = 0.0;
  double split_dt = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;

  void write_json(const std::filesystem::path& path) const;
};

NormTrackReport run_norm_tracking(const ExperimentConfig& cfg,
                                  std::uint64_t seed = 0);

// Cross-checks: independent-solver agreement, WKB/wave commutation, and
// the contraction of the Picard iteration.
struct CrossCheckPerEps {
  double eps = 0.0;
  double reference_agreement = 0.0;  // || assemble(S_wkb) - S_wave ||_{L2}
  double wkb_certificate = 0.0;
  double wave_certificate = 0.0;
  double commutation_l2 = 0.0;  // || assemble(Z_wkb) - Z(assemble) || at dt
  std::string note;
};

struct CrossCheckReport {
  std::vector<CrossCheckPerEps> per_eps;
  double commutation_dt = 0.0;
  double horizon = 0.0;
  std::vector<double> iteration_differences;
  bool iteration_contracted = false;
  double iteration_vs_reference = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;

  void write_json(const std::filesystem::path& path) const;
};

CrossCheckReport run_cross_check(const ExperimentConfig& cfg,
                                 std::uint64_t seed = 0);

// Single run: march both representations to T and dump the fields.
struct SimulateResult {
  double mass_drift = 0.0;
  double commutation_l2 = 0.0;
  std::vector<std::filesystem::path> outputs;
};

SimulateResult simulate(const ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir,
                        std::uint64_t seed = 0);

}  // namespace wkbsplit
