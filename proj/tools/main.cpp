#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wkbsplit/errors.hpp"
#include "wkbsplit/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir,
                  "output directory (default: the config's output_dir)");
  cmd->add_option("--jobs", opts.jobs, "parallel sweep cells")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "seed recorded in reports");
}

wkbsplit::ExperimentConfig load(CommonOpts& opts) {
  auto cfg = wkbsplit::ExperimentConfig::from_file(opts.config_path);
  if (opts.out_dir.empty()) opts.out_dir = cfg.output_dir;
  fs::create_directories(opts.out_dir);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wkbsplit: pseudospectral splitting laboratory for the semiclassical "
      "nonlinear Schroedinger equation"};
  app.require_subcommand(1);

  CommonOpts sim_opts, sweep_opts, local_opts, norm_opts, cross_opts;
  CLI::App* sim = app.add_subcommand("simulate", "single run, dumps fields");
  CLI::App* sweep = app.add_subcommand("sweep", "global convergence study");
  CLI::App* local = app.add_subcommand("local-error", "single-step error study");
  CLI::App* norm = app.add_subcommand("norm-track", "analytic-norm budgets");
  CLI::App* cross = app.add_subcommand("cross-check", "reference agreement");
  add_common(sim, sim_opts);
  add_common(sweep, sweep_opts);
  add_common(local, local_opts);
  add_common(norm, norm_opts);
  add_common(cross, cross_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto cfg = load(sim_opts);
      auto result = wkbsplit::simulate(cfg, sim_opts.out_dir, sim_opts.seed);
      std::cout << "mass drift " << result.mass_drift << ", commutation "
                << result.commutation_l2 << "\n";
      for (const auto& p : result.outputs) std::cout << "wrote " << p << "\n";
    } else if (sweep->parsed()) {
      auto cfg = load(sweep_opts);
      auto report = wkbsplit::run_global_convergence(cfg, sweep_opts.jobs,
                                                     sweep_opts.seed);
      const fs::path out(sweep_opts.out_dir);
      report.write_csv(out / "sweep.csv");
      report.write_json(out / "sweep_summary.json");
      std::cout << "wrote " << (out / "sweep.csv") << " and "
                << (out / "sweep_summary.json") << "\n";
      for (const auto& es : report.slopes)
        std::cout << "eps " << es.eps << ": wkb slope " << es.wkb.slope
                  << ", wave slope " << es.wave.slope << "\n";
    } else if (local->parsed()) {
      auto cfg = load(local_opts);
      auto report = wkbsplit::run_local_error_study(cfg, local_opts.seed);
      const fs::path out(local_opts.out_dir);
      report.write_csv(out / "local_error.csv");
      report.write_json(out / "local_error_summary.json");
      std::cout << "wrote " << (out / "local_error.csv") << " and "
                << (out / "local_error_summary.json") << "\n";
      for (const auto& pe : report.per_eps)
        std::cout << "eps " << pe.eps << ": slope " << pe.wkb_slope.slope
                  << ", prefactor " << pe.prefactor << "\n";
    } else if (norm->parsed()) {
      auto cfg = load(norm_opts);
      auto report = wkbsplit::run_norm_tracking(cfg, norm_opts.seed);
      const fs::path out(norm_opts.out_dir);
      report.write_json(out / "norm_track.json");
      std::cout << "wrote " << (out / "norm_track.json") << "\n";
      for (const auto& pe : report.per_eps) {
        std::cout << "eps " << pe.eps << ": accepted M (triple) "
                  << (pe.exact.accepted_triple
                          ? std::to_string(*pe.exact.accepted_triple)
                          : std::string("ladder exhausted"))
                  << ", split (sup) "
                  << (pe.split.accepted_sup
                          ? std::to_string(*pe.split.accepted_sup)
                          : std::string("ladder exhausted"))
                  << "\n";
      }
    } else if (cross->parsed()) {
      auto cfg = load(cross_opts);
      auto report = wkbsplit::run_cross_check(cfg, cross_opts.seed);
      const fs::path out(cross_opts.out_dir);
      report.write_json(out / "cross_check.json");
      std::cout << "wrote " << (out / "cross_check.json") << "\n";
      for (const auto& pe : report.per_eps)
        std::cout << "eps " << pe.eps << ": reference agreement "
                  << pe.reference_agreement << ", commutation "
                  << pe.commutation_l2 << "\n";
    }
  } catch (const wkbsplit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
