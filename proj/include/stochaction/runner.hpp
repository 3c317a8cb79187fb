#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stochaction/scenario.hpp"
#include "stochaction/statistics.hpp"

namespace stochaction {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  bool track_references = false;  // Bohmian and classical reference paths
  unsigned workers = 0;
  std::size_t histogram_bins = 64;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string manifest_hash;
  std::vector<ObservableReport> observables;
  std::vector<UncertaintyReport> uncertainty;
  std::optional<FactorizationReport> factorization;
  // Only with track_references: RMS distance at t_final of the actual paths
  // from the classical and from the Bohmian reference paths.
  std::optional<double> rms_classical;
  std::optional<double> rms_bohmian;
  std::optional<std::string> warning;
};

// Observables appropriate to the snapshot dimension.
std::vector<ObservableReport> standard_observables(const EnsembleSnapshot& snap, const HamiltonianSpec& spec);

// RMS over surviving trajectories of |actual - reference| at a snapshot.
double rms_distance(const std::vector<Point>& actual, const std::vector<Point>& reference,
                    const std::vector<unsigned char>& alive, int dim);

// Runs a scenario and writes every artifact into out_dir (created if
// needed): config.json, wavefunction_<k>.csv, hydro_<k>.csv, positions.csv,
// histogram.csv, observables.csv/.json, uncertainty.json, summary.json,
// factorization.json (compound scenarios) and manifest.json.
RunSummary run_scenario(const Scenario& scenario, const std::string& out_dir, const RunOptions& options);

struct SweepRow {
  double value = 0.0;
  RunSummary summary;
};

// One run per value of `key` under out_dir/sweep_<i>, plus sweep.csv with
// key,value,rms_classical,rms_bohmian,manifest_hash. References are tracked.
std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::string& key, const std::vector<double>& values,
                                const std::string& out_dir, const RunOptions& options);

}  // namespace stochaction
