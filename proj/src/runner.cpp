#include "stochaction/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace stochaction {

namespace fs = std::filesystem;

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigurationError("cli", "cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigurationError("cli", "cannot write '" + (dir_ / name).string() + "'");
    out << content;
    hashes_[name] = hex64(fnv1a(content));
  }

  const nlohmann::json& hashes() const { return hashes_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  nlohmann::json hashes_ = nlohmann::json::object();
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

HamiltonianSpec axis_spec(const HamiltonianParams& h, int axis) {
  const double m = axis == 0 ? h.mass : h.mass_y;
  if (h.omega > 0.0) return HamiltonianSpec::harmonic(m, h.omega, h.center[axis]);
  return HamiltonianSpec::free_particle(m, 1);
}

ObservableReport renamed(ObservableReport r, std::string name) {
  r.name = std::move(name);
  return r;
}

}  // namespace

double rms_distance(const std::vector<Point>& actual, const std::vector<Point>& reference,
                    const std::vector<unsigned char>& alive, int dim) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!alive[i]) continue;
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = actual[i][a] - reference[i][a];
      d2 += d * d;
    }
    acc += d2;
    ++n;
  }
  if (n == 0) throw ConfigurationError("cli", "no surviving trajectories");
  return std::sqrt(acc / static_cast<double>(n));
}

std::vector<ObservableReport> standard_observables(const EnsembleSnapshot& snap, const HamiltonianSpec& spec) {
  std::vector<ObservableReport> out;
  const int dim = snap.state.psi.grid().dim();
  if (dim == 1) {
    out.push_back(mean_position_function(snap, [](const Point& q) { return q[0]; }, "q"));
    out.push_back(position_variance(snap, 0));
    out.push_back(mean_momentum(snap, 0));
    out.push_back(mean_osmotic_momentum(snap, 0));
    out.push_back(renamed(mean_quadratic_momentum(snap, 0.0, 0), "p2"));
    const QuantumMoments qm = quantum_moments(snap.state, snap.hydro.boundary, 0);
    out.push_back(renamed(mean_quadratic_momentum(snap, qm.mean_p, 0), "var_p"));
  } else {
    out.push_back(mean_position_function(snap, [](const Point& q) { return q[0]; }, "q_x"));
    out.push_back(mean_position_function(snap, [](const Point& q) { return q[1]; }, "q_y"));
    out.push_back(renamed(position_variance(snap, 0), "var_q_x"));
    out.push_back(renamed(position_variance(snap, 1), "var_q_y"));
    out.push_back(renamed(mean_momentum(snap, 0), "p_x"));
    out.push_back(renamed(mean_momentum(snap, 1), "p_y"));
    out.push_back(mean_angular_momentum_2d(snap));
  }
  out.push_back(mean_energy(snap, spec));
  return out;
}

RunSummary run_scenario(const Scenario& input, const std::string& out_dir, const RunOptions& options) {
  Scenario s = input;
  if (options.seed) s.stochastic.seed = *options.seed;
  if (options.trajectories) s.trajectories = *options.trajectories;
  s.validate();

  RunSummary summary;
  summary.scenario = s.name;
  summary.seed = s.stochastic.seed;
  const std::string config_text = dump(s).dump(2);
  summary.config_hash = hex64(fnv1a(config_text));

  ArtifactWriter out{fs::path(out_dir)};
  out.write("config.json", config_text + "\n");

  const WaveFunction psi0 = s.initial_wavefunction();
  EnsembleConfig cfg = s.ensemble_config();
  cfg.track_bohmian = options.track_references;
  cfg.track_classical = options.track_references;
  cfg.workers = options.workers;
  const EnsembleResult result = run_ensemble(cfg, psi0);
  summary.warning = result.warning;

  const DiscreteHamiltonian hamiltonian =
      DiscreteHamiltonian::build(cfg.spec, psi0.psi.grid(), cfg.boundary, s.stochastic.lambda_mag);
  nlohmann::json snapshots_meta = nlohmann::json::array();
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const EnsembleSnapshot& snap = result.snapshots[k];
    std::ostringstream wf;
    write_wavefunction_csv(wf, snap.state);
    out.write("wavefunction_" + std::to_string(k) + ".csv", wf.str());
    std::ostringstream hy;
    write_hydro_csv(hy, snap.hydro);
    out.write("hydro_" + std::to_string(k) + ".csv", hy.str());
    snapshots_meta.push_back(snapshot_metadata(snap.state, hamiltonian));
  }

  if (result.trajectories > 0) {
    std::ostringstream pos;
    write_positions_csv(pos, result);
    out.write("positions.csv", pos.str());
    std::ostringstream hist;
    write_histogram_csv(hist, result, options.histogram_bins);
    out.write("histogram.csv", hist.str());

    for (const EnsembleSnapshot& snap : result.snapshots) {
      if (snap.alive_count() < 2 * kBatches) continue;
      for (auto& r : standard_observables(snap, cfg.spec)) summary.observables.push_back(std::move(r));
      for (int a = 0; a < snap.state.psi.grid().dim(); ++a) summary.uncertainty.push_back(uncertainty_report(snap, a));
    }
    std::ostringstream obs;
    write_reports_csv(obs, summary.observables);
    out.write("observables.csv", obs.str());
    nlohmann::json oj = nlohmann::json::array();
    for (const auto& r : summary.observables) oj.push_back(to_json(r));
    out.write("observables.json", oj.dump(2) + "\n");
    nlohmann::json uj = nlohmann::json::array();
    for (const auto& r : summary.uncertainty) uj.push_back(to_json(r));
    out.write("uncertainty.json", uj.dump(2) + "\n");

    if (options.track_references && !result.snapshots.empty()) {
      const EnsembleSnapshot& last = result.snapshots.back();
      summary.rms_classical = rms_distance(last.positions, last.classical_positions, last.alive, result.dim);
      summary.rms_bohmian = rms_distance(last.positions, last.bohmian_positions, last.alive, result.dim);
    }
  }

  if (s.factorization_samples > 0) {
    StochasticParams fp = s.stochastic;
    summary.factorization = verify_factorization(axis_spec(s.hamiltonian, 0), axis_spec(s.hamiltonian, 1), fp,
                                                 s.factorization_samples);
    out.write("factorization.json", to_json(*summary.factorization).dump(2) + "\n");
  }

  nlohmann::json sj = summary_json(result);
  sj["scenario"] = s.name;
  sj["config_hash"] = summary.config_hash;
  sj["wavefunction"] = snapshots_meta;
  if (summary.rms_classical) sj["rms_classical"] = *summary.rms_classical;
  if (summary.rms_bohmian) sj["rms_bohmian"] = *summary.rms_bohmian;
  out.write("summary.json", sj.dump(2) + "\n");

  nlohmann::json manifest = {{"scenario", s.name},
                             {"seed", s.stochastic.seed},
                             {"config_hash", summary.config_hash},
                             {"trajectories", s.trajectories},
                             {"files", out.hashes()}};
  summary.manifest_hash = hex64(fnv1a(manifest.dump()));
  manifest["manifest_hash"] = summary.manifest_hash;
  // Timestamps live only here and are excluded from the hash above.
  manifest["created_utc"] = utc_timestamp();
  std::ofstream mf(out.dir() / "manifest.json");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw ConfigurationError("cli", "cannot write manifest.json");
  return summary;
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::string& key, const std::vector<double>& values,
                                const std::string& out_dir, const RunOptions& options) {
  if (values.empty()) throw ValidationError("cli", "sweep", "needs at least one value");
  RunOptions opts = options;
  opts.track_references = true;
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Scenario si = with_value(scenario, key, values[i]);
    SweepRow row;
    row.value = values[i];
    row.summary = run_scenario(si, (fs::path(out_dir) / ("sweep_" + std::to_string(i))).string(), opts);
    rows.push_back(std::move(row));
  }
  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  csv << std::setprecision(12) << "key,value,rms_classical,rms_bohmian,manifest_hash\n";
  for (const auto& r : rows) {
    csv << key << ',' << r.value << ',' << r.summary.rms_classical.value_or(NAN) << ','
        << r.summary.rms_bohmian.value_or(NAN) << ',' << r.summary.manifest_hash << '\n';
  }
  if (!csv) throw ConfigurationError("cli", "cannot write sweep.csv");
  return rows;
}

}  // namespace stochaction
