#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "wkbsplit/config.hpp"
#include "wkbsplit/errors.hpp"
#include "wkbsplit/field_io.hpp"
#include "wkbsplit/harness.hpp"
#include "wkbsplit/slope_fit.hpp"

using namespace wkbsplit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "wkbsplit_test";
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Small, fast sweep configuration for harness plumbing tests (the short
// half-length keeps the dealias band well clear of the data's spectrum).
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.grid = GridSpec{1, 128, 4.0 * M_PI};
  cfg.model = ModelSpec{{0.25, 0.125}, 0.5, 1, 0.125};
  cfg.amplitude = AmplitudeSpec{1.0, 0.5};
  cfg.phase = PhaseSpec{"gaussian", 0.1, 0.5, 1.0};
  cfg.dt_list = {0.125 / 8.0, 0.125 / 16.0, 0.125 / 32.0, 0.125 / 64.0};
  cfg.norms = NormSpec{2.0, 1.0, 0.25, {4.0, 8.0}};
  cfg.reference = ReferenceSpec{1e-9, 0};
  cfg.task = "sweep";
  return cfg;
}

}  // namespace

TEST_CASE("slope fit recovers exact power laws") {
  std::vector<double> x{1.0, 0.5, 0.25, 0.125, 0.0625};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  SlopeFit fit = fit_loglog(x, y);
  CHECK(fit.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(fit.points_used == 5);

  SUBCASE("rounding floor excludes points") {
    y.back() = 1e-13;
    SlopeFit f2 = fit_loglog(x, y);
    CHECK(f2.points_used == 4);
  }
}

TEST_CASE("config parsing and validation") {
  SUBCASE("round trip through JSON text") {
    ExperimentConfig cfg = tiny_config();
    ExperimentConfig back = ExperimentConfig::from_json_text(cfg.to_json_text());
    CHECK(back.grid.points == cfg.grid.points);
    CHECK(back.model.epsilons == cfg.model.epsilons);
    CHECK(back.hash() == cfg.hash());
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(R"({"grid": {"dim": 1}, "bogus": 2})"),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(R"({"grid": {"dim": 1, "n": 64}})"),
        ConfigError);
  }
  SUBCASE("invalid JSON is rejected") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{"), ConfigError);
  }
  SUBCASE("invariants") {
    ExperimentConfig cfg = tiny_config();
    cfg.model.epsilons = {2.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = tiny_config();
    cfg.dt_list = {1.0};  // dt > T
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = tiny_config();
    cfg.task = "norm-track";
    cfg.model.horizon = 0.125;  // >= M0 / min ladder = 0.0625
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.model.horizon = 0.05;
    cfg.dt_list = {0.05 / 8.0};
    CHECK_NOTHROW(cfg.validate());
  }
}

TEST_CASE("initial data profiles") {
  Grid g(1, 64, 4.0 * M_PI);
  SUBCASE("zero phase") {
    WkbState s = build_initial_state(g, {1.0, 0.5}, {"zero", 0.0, 0.5, 1.0});
    CHECK(linf_norm(s.phase) == 0.0);
  }
  SUBCASE("cosine phase on the lattice") {
    WkbState s = build_initial_state(g, {1.0, 0.5}, {"cosine", 0.3, 0.5, 1.0});
    CHECK(linf_norm(s.phase) == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("off-lattice cosine frequency is rejected") {
    CHECK_THROWS_AS(
        build_initial_state(g, {1.0, 0.5}, {"cosine", 0.3, 0.5, 1.1}),
        ConfigError);
  }
  SUBCASE("unknown profile is rejected") {
    CHECK_THROWS_AS(
        build_initial_state(g, {1.0, 0.5}, {"sawtooth", 0.3, 0.5, 1.0}),
        ConfigError);
  }
}

TEST_CASE("field dumps round trip bit-exactly") {
  Grid g(1, 64, 4.0);
  const fs::path dir = temp_dir();

  SUBCASE("complex field") {
    ComplexField f = testutil::random_band_limited(g, 99);
    const fs::path p = dir / "field.wkbf";
    dump_field(f, p);
    ComplexField back = load_field(g, p);
    CHECK(std::equal(f.values().begin(), f.values().end(),
                     back.values().begin(),
                     [](Complex a, Complex b) {
                       return std::memcmp(&a, &b, sizeof a) == 0;
                     }));
  }
  SUBCASE("wkb state with time stamp") {
    WkbState s = testutil::gaussian_state(g);
    s.time = 0.725;
    const fs::path p = dir / "state.wkbf";
    dump_state(s, p);
    WkbState back = load_state(g, p);
    CHECK(back.time == 0.725);
    CHECK(std::equal(s.phase.values().begin(), s.phase.values().end(),
                     back.phase.values().begin(),
                     [](double a, double b) {
                       return std::memcmp(&a, &b, sizeof a) == 0;
                     }));
    CHECK(std::equal(s.amplitude.values().begin(), s.amplitude.values().end(),
                     back.amplitude.values().begin(),
                     [](Complex a, Complex b) {
                       return std::memcmp(&a, &b, sizeof a) == 0;
                     }));
  }
}

TEST_CASE("field dump error paths") {
  Grid g(1, 64, 4.0);
  Grid other(1, 128, 4.0);
  const fs::path dir = temp_dir();
  const fs::path p = dir / "err.wkbf";
  ComplexField f = testutil::random_band_limited(g, 5);
  dump_field(f, p);

  SUBCASE("grid mismatch") {
    CHECK_THROWS_AS(load_field(other, p), IoError);
  }
  SUBCASE("kind mismatch") {
    CHECK_THROWS_AS(load_state(g, p), IoError);
  }
  SUBCASE("bad magic") {
    auto bytes = read_file(p);
    bytes[0] = 'X';
    std::ofstream(p, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(load_field(g, p), IoError);
  }
  SUBCASE("version mismatch") {
    auto bytes = read_file(p);
    bytes[4] = 9;
    std::ofstream(p, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(load_field(g, p), IoError);
  }
  SUBCASE("truncated payload") {
    auto bytes = read_file(p);
    bytes.resize(bytes.size() - 16);
    std::ofstream(p, std::ios::binary).write(bytes.data(), bytes.size());
    CHECK_THROWS_AS(load_field(g, p), IoError);
  }
}

TEST_CASE("endianness tag is honored") {
  Grid g(1, 64, 4.0);
  const fs::path dir = temp_dir();
  const fs::path p = dir / "native.wkbf";
  const fs::path q = dir / "swapped.wkbf";
  ComplexField f = testutil::random_band_limited(g, 123);
  dump_field(f, p);

  // Byte-swap every 4-byte header word and every f64 to fake a dump from an
  // opposite-endian host.
  auto bytes = read_file(p);
  auto swap4 = [&](std::size_t off) {
    std::swap(bytes[off], bytes[off + 3]);
    std::swap(bytes[off + 1], bytes[off + 2]);
  };
  auto swap8 = [&](std::size_t off) {
    for (int i = 0; i < 4; ++i) std::swap(bytes[off + i], bytes[off + 7 - i]);
  };
  swap4(4);
  swap4(8);
  swap4(12);
  swap8(16);
  swap4(24);
  swap4(28);
  swap8(32);
  for (std::size_t off = 64; off + 8 <= bytes.size(); off += 8) swap8(off);
  std::ofstream(q, std::ios::binary).write(bytes.data(), bytes.size());

  DumpHeader h = read_dump_header(q);
  CHECK(h.swapped);
  ComplexField back = load_field(g, q);
  CHECK(testutil::max_abs_diff(back.values(), f.values()) == 0.0);
}

TEST_CASE("simulate writes dumps and a summary") {
  ExperimentConfig cfg = tiny_config();
  cfg.model.epsilons = {0.25};
  cfg.dt_list = {0.125 / 16.0};
  const fs::path dir = temp_dir() / "sim";
  SimulateResult r = simulate(cfg, dir, 7);
  CHECK(r.mass_drift < 1e-10);
  CHECK(r.commutation_l2 < 1e-6);  // per-step identity ~1e-8 over 16 steps
  for (const auto& p : r.outputs) CHECK(fs::exists(p));
  Grid g(cfg.grid.dim, cfg.grid.points, cfg.grid.half_length);
  WkbState s = load_state(g, dir / "state_final.wkbf");
  CHECK(s.time == doctest::Approx(cfg.model.horizon));
}

TEST_CASE("sweep reports are deterministic and parallel-invariant") {
  ExperimentConfig cfg = tiny_config();
  cfg.model.epsilons = {0.25};
  cfg.dt_list = {0.125 / 8.0, 0.125 / 16.0, 0.125 / 32.0};
  cfg.reference.certificate = 1e-8;

  SweepReport r1 = run_global_convergence(cfg, 1, 42);
  SweepReport r2 = run_global_convergence(cfg, 2, 42);

  const fs::path dir = temp_dir();
  r1.write_csv(dir / "a.csv");
  r2.write_csv(dir / "b.csv");
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
  CHECK(!r1.rows.empty());
  for (const SweepRow& row : r1.rows) {
    CHECK(row.note.empty());
    CHECK(std::isfinite(row.wave_l2));
    CHECK(row.wave_l2 >= 0.0);
  }
  // First-order convergence visible even on the tiny grid.
  CHECK(r1.slopes.at(0).wkb.slope > 0.7);
  r1.write_json(dir / "a.json");
  CHECK(read_file(dir / "a.json").find("config_hash") != std::string::npos);
}

TEST_CASE("lambda = 0 sweep: splitting is exact, all errors at rounding level") {
  ExperimentConfig cfg = tiny_config();
  cfg.model.epsilons = {0.25};
  cfg.model.lambda = 0.0;
  cfg.dt_list = {0.125 / 8.0, 0.125 / 32.0};
  SweepReport rep = run_global_convergence(cfg, 1, 0);
  REQUIRE(!rep.rows.empty());
  for (const SweepRow& r : rep.rows) {
    CHECK(r.note.empty());
    CHECK(r.wave_l2 <= 1e-9);
    CHECK(std::max(r.density_l1, r.density_linf) <= 1e-9);
    CHECK(std::max(r.current_l1, r.current_linf) <= 1e-9);
    CHECK(std::max(r.phase_hk, r.amp_hk) <= 1e-9);
  }
}

TEST_CASE("norm tracking accepts some ladder rung on gentle data") {
  ExperimentConfig cfg = tiny_config();
  cfg.task = "norm-track";
  cfg.model.epsilons = {0.0625};
  cfg.model.lambda = 1.0;
  cfg.model.horizon = 0.05;
  cfg.dt_list = {0.05 / 16.0};
  cfg.norms = NormSpec{2.0, 1.0, 0.25, {4.0, 8.0, 16.0, 32.0, 64.0}};
  cfg.validate();
  NormTrackReport rep = run_norm_tracking(cfg, 3);
  REQUIRE(rep.per_eps.size() == 1);
  CHECK(rep.per_eps[0].note.empty());
  CHECK(rep.per_eps[0].exact.accepted_triple.has_value());
  CHECK(rep.per_eps[0].split.accepted_sup.has_value());

  SUBCASE("halving the horizon never tightens the accepted M") {
    ExperimentConfig half = cfg;
    half.model.horizon = 0.025;
    half.dt_list = {0.025 / 16.0};
    NormTrackReport rep_half = run_norm_tracking(half, 3);
    REQUIRE(rep_half.per_eps[0].exact.accepted_triple.has_value());
    CHECK(*rep_half.per_eps[0].exact.accepted_triple <=
          *rep.per_eps[0].exact.accepted_triple);
    REQUIRE(rep_half.per_eps[0].split.accepted_sup.has_value());
    CHECK(*rep_half.per_eps[0].split.accepted_sup <=
          *rep.per_eps[0].split.accepted_sup);
  }
}
