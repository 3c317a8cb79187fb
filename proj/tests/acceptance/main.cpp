// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Usage: acceptance_tests [quick|full] [criterion ...]

#include <cstdlib>
#include <iostream>
#include <string>

#include "stochaction/acceptance.hpp"

int main(int argc, char** argv) {
  stochaction::SuiteOptions opts;
  opts.suite = argc > 1 ? argv[1] : "full";
  if (!stochaction::known_suite(opts.suite)) {
    std::cerr << "unknown suite '" << opts.suite << "'\n";
    return 2;
  }
  for (int i = 2; i < argc; ++i) opts.only.insert(std::atoi(argv[i]));
  opts.progress = &std::cout;
  const auto results = stochaction::run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
