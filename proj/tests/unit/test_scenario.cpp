#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "stochaction/runner.hpp"
#include "stochaction/scenario.hpp"

using namespace stochaction;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stochaction_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const Scenario s = parse_config(R"({"initial": {"kind": "gaussian", "center": [0.0], "width": [1.0]}})");
  const auto j = dump(s);
  CHECK(j["name"] == "custom");
  CHECK(j["hamiltonian"]["mass"] == 1.0);
  CHECK(j["hamiltonian"]["dim"] == 1);
  CHECK(j["grid"]["points"][0] == 2048);
  CHECK(j["grid"]["boundary"] == "dirichlet");
  CHECK(j["stochastic"]["lambda_mag"] == 1.0);
  CHECK(j["stochastic"]["dt"] == 0.005);
  CHECK(j["stochastic"]["flip_prob"] == 0.5);
  CHECK(j["seed"] == 0);
  CHECK(j["t_final"] == 1.0);
  CHECK(j["trajectories"] == 10000);
}

TEST_CASE("validation errors name the field") {
  try {
    parse_config(R"({"hamiltonian": {"mass": -1.0}})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "hamiltonian.mass");
    CHECK(std::string(e.what()).find("mass") != std::string::npos);
  }
  try {
    parse_config(R"({"stochastic": {"lambda": 1.0}})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "stochastic.lambda");
  }
  CHECK_THROWS_AS(parse_config(R"({"t_final": 1.0, "stochastic": {"dt": 0.3}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"boundary": "open"}})"), ValidationError);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_config("{\n  \"name\": \"x\",\n  \"seed\": ,\n}", "bad.json");
    FAIL("expected a parse error");
  } catch (const ConfigurationError& e) {
    CHECK(std::string(e.what()).rfind("bad.json:3:", 0) == 0);
  }
}

TEST_CASE("dump and load round trip") {
  for (const auto& name : preset_names()) {
    const Scenario a = preset(name);
    const auto once = dump(scenario_from_json(dump(a)));
    const auto twice = dump(scenario_from_json(once));
    CHECK(once == twice);
    CHECK(once == dump(a));
  }
}

TEST_CASE("presets give normalized initial states") {
  const auto names = preset_names();
  for (const char* required : {"free_gaussian", "oscillator_n0", "oscillator_n1", "superposition_phase",
                               "two_free_particles", "position_dependent_mass"}) {
    CHECK(std::find(names.begin(), names.end(), required) != names.end());
  }
  for (const auto& name : names) {
    CAPTURE(name);
    CHECK(preset(name).initial_wavefunction().norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(preset("nope"), ConfigurationError);
}

TEST_CASE("with_value") {
  const Scenario s = with_value(preset("free_gaussian"), "lambda_mag", 0.1);
  CHECK(s.stochastic.lambda_mag == 0.1);
  CHECK(with_value(s, "hamiltonian.mass", 2.0).hamiltonian.mass == 2.0);
  CHECK_THROWS_AS(with_value(s, "hamiltonian.nothing", 1.0), ValidationError);
  CHECK_THROWS_AS(with_value(s, "dt", 0.3), ValidationError);
}

TEST_CASE("runs are reproducible") {
  Scenario s = preset("free_gaussian");
  s.grid.points = {512};
  s.t_final = 0.5;
  s.snapshots = {0.0, 0.5};
  s.stochastic.dt_step = 0.01;
  s.validate();
  RunOptions o;
  o.seed = 42;
  o.trajectories = 2000;
  o.workers = 2;
  const fs::path a = scratch("a"), b = scratch("b");
  const RunSummary ra = run_scenario(s, a.string(), o);
  o.workers = 1;
  const RunSummary rb = run_scenario(s, b.string(), o);
  CHECK(ra.manifest_hash == rb.manifest_hash);
  CHECK(ra.config_hash == rb.config_hash);
  for (const char* f : {"config.json", "positions.csv", "histogram.csv", "observables.csv", "summary.json",
                        "wavefunction_1.csv", "hydro_1.csv", "uncertainty.json"}) {
    CAPTURE(f);
    CHECK(read_file(a / f) == read_file(b / f));
  }
  CHECK(fs::exists(a / "manifest.json"));
  CHECK_FALSE(fs::exists(a / "factorization.json"));

  o.seed = 43;
  const RunSummary rc = run_scenario(s, scratch("c").string(), o);
  CHECK(rc.manifest_hash != ra.manifest_hash);
}

TEST_CASE("compound scenarios write a factorization report") {
  Scenario s = preset("two_free_particles");
  s.grid.points = {32, 32};
  s.t_final = 0.1;
  s.snapshots = {0.0, 0.1};
  s.factorization_samples = 20000;
  s.validate();
  RunOptions o;
  o.trajectories = 500;
  const fs::path dir = scratch("pair");
  const RunSummary r = run_scenario(s, dir.string(), o);
  REQUIRE(r.factorization.has_value());
  CHECK(fs::exists(dir / "factorization.json"));
}

TEST_CASE("classical-limit sweep") {
  Scenario s = preset("free_gaussian");
  s.grid.points = {1024};
  s.t_final = 1.0;
  s.snapshots = {0.0, 1.0};
  s.stochastic.dt_step = 0.01;
  s.validate();
  RunOptions o;
  o.trajectories = 1000;
  const fs::path dir = scratch("sweep");
  const auto rows = run_sweep(s, "lambda_mag", {1.0, 0.1, 0.01}, dir.string(), o);
  REQUIRE(rows.size() == 3);
  CHECK(*rows[1].summary.rms_classical < *rows[0].summary.rms_classical);
  CHECK(*rows[2].summary.rms_classical < *rows[1].summary.rms_classical);
  CHECK(fs::exists(dir / "sweep.csv"));
}
