#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "wkbsplit/grid.hpp"
#include "wkbsplit/wkb_state.hpp"

namespace wkbsplit {

struct GridSpec {
  int dim = 1;
  int points = 512;
  double half_length = 16.0 * M_PI;
};

struct ModelSpec {
  std::vector<double> epsilons{0.125};
  double lambda = 1.0;
  int sigma = 1;
  double horizon = 0.25;  // T
};

// Initial data: gaussian amplitude a0(x) = A exp(-alpha |x|^2) and a phase
// profile from {zero, gaussian, cosine}.
struct AmplitudeSpec {
  double A = 1.0;
  double alpha = 0.5;
};

struct PhaseSpec {
  std::string profile = "gaussian";  // zero | gaussian | cosine
  double amplitude = 0.1;
  double beta = 0.5;       // gaussian width
  double frequency = 1.0;  // cosine frequency (must sit on the lattice)
};

struct NormSpec {
  double ell = 2.0;
  double nu = 1.0;
  double M0 = 0.25;
  std::vector<double> M_ladder{4.0, 8.0, 16.0, 32.0, 64.0};
};

struct ReferenceSpec {
  double certificate = 1e-10;
  long initial_substeps = 0;  // 0 = automatic
};

struct ExperimentConfig {
  GridSpec grid;
  ModelSpec model;
  AmplitudeSpec amplitude;
  PhaseSpec phase;
  std::vector<double> dt_list;
  NormSpec norms;
  ReferenceSpec reference;
  std::string output_dir = ".";
  std::string task = "sweep";  // simulate | sweep | local-error | norm-track | cross-check
  bool dealias = true;
  // Local-error study time grid (single-step horizons).
  std::vector<double> local_error_times;

  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  // FNV-1a hash of the canonical JSON dump; recorded in every report.
  std::string hash() const;
  void validate() const;
};

std::unique_ptr<Grid> make_grid(const GridSpec& spec);
WkbState build_initial_state(const Grid& g, const AmplitudeSpec& amp,
                             const PhaseSpec& phase);

}  // namespace wkbsplit
