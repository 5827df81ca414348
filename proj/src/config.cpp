#include "wkbsplit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  reject_unknown_keys(j,
                      {"grid", "model", "initial_data", "dt_list", "norms",
                       "reference", "output_dir", "task", "dealias",
                       "local_error_times"},
                      "top level");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown_keys(g, {"dim", "points", "half_length"}, "grid");
    read_if(g, "dim", cfg.grid.dim);
    read_if(g, "points", cfg.grid.points);
    read_if(g, "half_length", cfg.grid.half_length);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown_keys(m, {"epsilons", "lambda", "sigma", "T"}, "model");
    read_if(m, "epsilons", cfg.model.epsilons);
    read_if(m, "lambda", cfg.model.lambda);
    read_if(m, "sigma", cfg.model.sigma);
    read_if(m, "T", cfg.model.horizon);
  }
  if (j.contains("initial_data")) {
    const auto& d = j.at("initial_data");
    reject_unknown_keys(d, {"amplitude", "phase"}, "initial_data");
    if (d.contains("amplitude")) {
      const auto& a = d.at("amplitude");
      reject_unknown_keys(a, {"A", "alpha"}, "initial_data.amplitude");
      read_if(a, "A", cfg.amplitude.A);
      read_if(a, "alpha", cfg.amplitude.alpha);
    }
    if (d.contains("phase")) {
      const auto& ph = d.at("phase");
      reject_unknown_keys(ph, {"profile", "amplitude", "beta", "frequency"},
                          "initial_data.phase");
      read_if(ph, "profile", cfg.phase.profile);
      read_if(ph, "amplitude", cfg.phase.amplitude);
      read_if(ph, "beta", cfg.phase.beta);
      read_if(ph, "frequency", cfg.phase.frequency);
    }
  }
  read_if(j, "dt_list", cfg.dt_list);
  if (j.contains("norms")) {
    const auto& n = j.at("norms");
    reject_unknown_keys(n, {"ell", "nu", "M0", "M_ladder"}, "norms");
    read_if(n, "ell", cfg.norms.ell);
    read_if(n, "nu", cfg.norms.nu);
    read_if(n, "M0", cfg.norms.M0);
    read_if(n, "M_ladder", cfg.norms.M_ladder);
  }
  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    reject_unknown_keys(r, {"certificate", "initial_substeps"}, "reference");
    read_if(r, "certificate", cfg.reference.certificate);
    read_if(r, "initial_substeps", cfg.reference.initial_substeps);
  }
  read_if(j, "output_dir", cfg.output_dir);
  read_if(j, "task", cfg.task);
  read_if(j, "dealias", cfg.dealias);
  read_if(j, "local_error_times", cfg.local_error_times);

  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["grid"] = {{"dim", grid.dim},
               {"points", grid.points},
               {"half_length", grid.half_length}};
  j["model"] = {{"epsilons", model.epsilons},
                {"lambda", model.lambda},
                {"sigma", model.sigma},
                {"T", model.horizon}};
  j["initial_data"] = {
      {"amplitude", {{"A", amplitude.A}, {"alpha", amplitude.alpha}}},
      {"phase",
       {{"profile", phase.profile},
        {"amplitude", phase.amplitude},
        {"beta", phase.beta},
        {"frequency", phase.frequency}}}};
  j["dt_list"] = dt_list;
  j["norms"] = {{"ell", norms.ell},
                {"nu", norms.nu},
                {"M0", norms.M0},
                {"M_ladder", norms.M_ladder}};
  j["reference"] = {{"certificate", reference.certificate},
                    {"initial_substeps", reference.initial_substeps}};
  j["output_dir"] = output_dir;
  j["task"] = task;
  j["dealias"] = dealias;
  j["local_error_times"] = local_error_times;
  return j.dump(2);
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json_text();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> tasks{"simulate", "sweep", "local-error",
                                           "norm-track", "cross-check"};
  if (!tasks.count(task)) throw ConfigError("config: unknown task '" + task + "'");
  if (grid.dim != 1 && grid.dim != 2)
    throw ConfigError("config: grid.dim must be 1 or 2");
  if (grid.points < 16 || (grid.points & (grid.points - 1)) != 0)
    throw ConfigError("config: grid.points must be a power of two >= 16");
  if (!(grid.half_length > 0.0))
    throw ConfigError("config: grid.half_length must be positive");
  if (model.epsilons.empty())
    throw ConfigError("config: model.epsilons must be nonempty");
  for (double e : model.epsilons)
    if (!(e > 0.0) || e > 1.0)
      throw ConfigError("config: every eps must lie in (0, 1]");
  if (model.sigma < 1) throw ConfigError("config: sigma must be >= 1");
  if (!(model.horizon > 0.0)) throw ConfigError("config: T must be positive");
  for (double dt : dt_list)
    if (!(dt > 0.0) || dt > model.horizon + 1e-15)
      throw ConfigError("config: every dt must lie in (0, T]");
  if (!(norms.ell >= 0.0)) throw ConfigError("config: norms.ell must be >= 0");
  if (!(norms.nu > 0.0) || norms.nu > 1.0)
    throw ConfigError("config: norms.nu must lie in (0, 1]");
  if (task == "norm-track") {
    if (norms.M_ladder.empty())
      throw ConfigError("config: norm tracking needs a nonempty M ladder");
    const double mmin =
        *std::min_element(norms.M_ladder.begin(), norms.M_ladder.end());
    if (!(model.horizon < norms.M0 / mmin))
      throw ConfigError(
          "config: norm tracking requires T < M0 / min(M ladder)");
  }
  for (double t : local_error_times)
    if (!(t > 0.0)) throw ConfigError("config: local_error_times must be positive");
}

std::unique_ptr<Grid> make_grid(const GridSpec& spec) {
  return std::make_unique<Grid>(spec.dim, spec.points, spec.half_length);
}

WkbState build_initial_state(const Grid& g, const AmplitudeSpec& amp,
                             const PhaseSpec& phase) {
  std::vector<double> phi(g.size());
  std::vector<Complex> a(g.size());

  const int n = g.points_per_axis();
  auto fill = [&](auto&& value_at) {
    if (g.dim() == 1) {
      for (int i = 0; i < n; ++i) value_at(i, g.coordinate(i), 0.0);
    } else {
      std::size_t flat = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j, ++flat)
          value_at(flat, g.coordinate(i), g.coordinate(j));
    }
  };

  if (phase.profile != "zero" && phase.profile != "gaussian" &&
      phase.profile != "cosine")
    throw ConfigError("initial data: unknown phase profile '" + phase.profile + "'");
  if (phase.profile == "cosine") {
    // The frequency must be a lattice wavenumber k = m pi / L.
    const double m = phase.frequency * g.half_length() / M_PI;
    if (std::abs(m - std::round(m)) > 1e-12)
      throw ConfigError("initial data: cosine frequency is not on the lattice");
  }

  fill([&](std::size_t flat, double x, double y) {
    const double r2 = x * x + y * y;
    a[flat] = amp.A * std::exp(-amp.alpha * r2);
    if (phase.profile == "zero") {
      phi[flat] = 0.0;
    } else if (phase.profile == "gaussian") {
      phi[flat] = phase.amplitude * std::exp(-phase.beta * r2);
    } else {
      double v = std::cos(phase.frequency * x);
      if (g.dim() == 2) v += std::cos(phase.frequency * y);
      phi[flat] = phase.amplitude * v;
    }
  });

  return WkbState(RealField(g, std::move(phi)),
                  ComplexField::from_values(g, std::move(a)), 0.0);
}

}  // namespace wkbsplit
