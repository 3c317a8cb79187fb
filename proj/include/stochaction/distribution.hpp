#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stochaction/grid.hpp"

namespace stochaction {

// Equal-width bins on [lo, hi]. Samples outside land in underflow/overflow.
class Histogram {
 public:
  Histogram(double lo, double hi, std::size_t bins);

  void add(double x);
  void add(std::span<const double> xs) {
    for (double x : xs) add(x);
  }

  std::size_t bins() const { return counts_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double edge(std::size_t k) const;
  const std::vector<double>& counts() const { return counts_; }
  double underflow() const { return underflow_; }
  double overflow() const { return overflow_; }
  double total() const;

  // Probabilities laid out as [underflow, bin_0 .. bin_{n-1}, overflow].
  std::vector<double> probabilities_with_tails() const;

 private:
  double lo_;
  double hi_;
  std::vector<double> counts_;
  double underflow_ = 0.0;
  double overflow_ = 0.0;
};

// Half the L1 distance between two nonnegative weight vectors, each
// normalized to unit mass first.
double total_variation(std::span<const double> p, std::span<const double> q);

// Mass of a 1D density field inside each bin of `h`, in the same
// [underflow, bins.., overflow] layout. The density is piecewise constant
// per cell.
std::vector<double> bin_probabilities(const RealField& density, const Histogram& h);

struct KsResult {
  double statistic;
  double p_value;
};

// Asymptotic Kolmogorov tail probability Q(lambda).
double kolmogorov_q(double lambda);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace stochaction
