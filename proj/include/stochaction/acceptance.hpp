#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace stochaction {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;         // one-line measured-vs-threshold summary
  nlohmann::json measured;    // every measured value and threshold
};

struct SuiteOptions {
  std::string suite = "full";  // "quick" or "full"
  std::set<int> only;          // empty: all criteria
  unsigned workers = 0;
  std::ostream* progress = nullptr;  // one line per finished criterion
};

bool known_suite(const std::string& name);
std::vector<std::string> suite_names();

// Runs the acceptance criteria. "full" uses the stated sample sizes;
// "quick" shrinks only the ensembles of the z-score criteria (6 and 7).
std::vector<CriterionResult> run_acceptance(const SuiteOptions& options);

std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const std::vector<CriterionResult>& results);

}  // namespace stochaction
