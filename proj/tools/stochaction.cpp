#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stochaction/acceptance.hpp"
#include "stochaction/runner.hpp"
#include "stochaction/scenario.hpp"

namespace sa = stochaction;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kCriterion = 3 };

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw sa::ValidationError("cli", "sweep", "bad value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_summary(const sa::RunSummary& s, const std::string& out_dir) {
  std::cout << "scenario " << s.scenario << " seed " << s.seed << "\n"
            << "config_hash " << s.config_hash << "\n"
            << "manifest_hash " << s.manifest_hash << "\n";
  if (!s.observables.empty()) {
    std::cout << std::left << std::setw(18) << "observable" << std::setw(8) << "t" << std::setw(16) << "ensemble"
              << std::setw(12) << "mc_err" << std::setw(16) << "quantum" << "z\n";
    for (const auto& r : s.observables) {
      std::cout << std::setw(18) << r.name << std::setw(8) << std::setprecision(4) << r.time << std::setw(16)
                << std::setprecision(8) << r.ensemble << std::setw(12) << std::setprecision(3) << r.mc_err
                << std::setw(16) << std::setprecision(8) << r.quantum << std::setprecision(3) << r.z << "\n";
    }
  }
  if (s.warning) std::cout << "warning: " << *s.warning << "\n";
  std::cout << "artifacts in " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-action simulator: Schrodinger solver, sign-switching trajectories and checks"};
  app.require_subcommand(1);

  std::string config_path, scenario_name, out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  unsigned workers = 0;
  bool list = false, references = false;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write artifacts");
  auto* cfg_opt = run->add_option("--config", config_path, "Scenario file (JSON)")->check(CLI::ExistingFile);
  auto* sc_opt = run->add_option("--scenario", scenario_name, "Built-in preset name");
  cfg_opt->excludes(sc_opt);
  run->add_option("--seed", seed, "Master seed (overrides the scenario)");
  run->add_option("--trajectories", trajectories, "Ensemble size (overrides the scenario)");
  run->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  std::vector<std::string> sweep;
  run->add_option("--sweep", sweep, "KEY V1,V2,...: one run per value")->expected(2);
  run->add_flag("--references", references, "Track Bohmian and classical reference paths");
  run->add_flag("--list-scenarios", list, "List built-in presets and exit");
  run->add_option("--workers", workers, "Worker threads (0: all cores)");

  std::string suite;
  std::string verify_out = "verify_out";
  std::vector<int> only;
  CLI::App* verify = app.add_subcommand("verify", "Run an acceptance suite");
  verify->add_option("suite", suite, "quick | full")->required();
  verify->add_option("--out-dir", verify_out, "Where verify.json is written")->capture_default_str();
  verify->add_option("--only", only, "Criterion numbers to run");
  verify->add_option("--workers", workers, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      if (list) {
        for (const auto& n : sa::preset_names()) std::cout << n << "\n";
        return kOk;
      }
      if (config_path.empty() == scenario_name.empty()) {
        std::cerr << "error: run needs exactly one of --config or --scenario\n";
        return kValidation;
      }
      const sa::Scenario s = config_path.empty() ? sa::preset(scenario_name) : sa::load_config(config_path);
      sa::RunOptions opts;
      opts.seed = seed;
      opts.trajectories = trajectories;
      opts.workers = workers;
      opts.track_references = references;
      if (!sweep.empty()) {
        const std::string& sweep_key = sweep[0];
        const auto rows = sa::run_sweep(s, sweep_key, parse_values(sweep[1]), out_dir, opts);
        std::cout << std::left << std::setw(14) << sweep_key << std::setw(18) << "rms_classical" << std::setw(18)
                  << "rms_bohmian" << "manifest_hash\n";
        for (const auto& r : rows) {
          std::cout << std::setw(14) << r.value << std::setw(18) << std::setprecision(6)
                    << r.summary.rms_classical.value_or(NAN) << std::setw(18) << r.summary.rms_bohmian.value_or(NAN)
                    << r.summary.manifest_hash << "\n";
        }
        return kOk;
      }
      print_summary(sa::run_scenario(s, out_dir, opts), out_dir);
      return kOk;
    }

    if (!sa::known_suite(suite)) {
      std::cerr << "error: unknown suite '" << suite << "' (expected quick or full)\n";
      return kValidation;
    }
    sa::SuiteOptions so;
    so.suite = suite;
    so.only.insert(only.begin(), only.end());
    so.workers = workers;
    so.progress = &std::cout;
    const auto results = sa::run_acceptance(so);
    std::filesystem::create_directories(verify_out);
    const auto path = std::filesystem::path(verify_out) / "verify.json";
    std::ofstream(path) << sa::to_json(results).dump(2) << "\n";
    std::vector<std::string> failed;
    for (const auto& r : results) {
      if (!r.passed) failed.push_back(std::to_string(r.id) + " (" + r.name + ")");
    }
    std::cout << "report: " << path.string() << "\n";
    if (!failed.empty()) {
      std::cerr << "failed criteria:";
      for (const auto& f : failed) std::cerr << " " << f;
      std::cerr << "\n";
      return kCriterion;
    }
    return kOk;
  } catch (const sa::ConfigurationError& e) {
    std::cerr << "error [" << e.module() << "] scenario " << (scenario_name.empty() ? config_path : scenario_name)
              << ": " << e.what() << "\n";
    return kValidation;
  } catch (const sa::Error& e) {
    std::cerr << "error [" << e.module() << "] scenario " << (scenario_name.empty() ? config_path : scenario_name)
              << ": " << e.what() << "\n";
    return kNumerical;
  }
}
