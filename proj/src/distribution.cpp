#include "stochaction/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stochaction {

Histogram::Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0.0) {
  if (bins == 0 || !(hi > lo)) throw ConfigurationError("statistics", "histogram needs lo < hi and bins > 0");
}

void Histogram::add(double x) {
  if (x < lo_) {
    underflow_ += 1.0;
    return;
  }
  if (x >= hi_) {
    overflow_ += 1.0;
    return;
  }
  auto k = static_cast<std::size_t>((x - lo_) / (hi_ - lo_) * static_cast<double>(counts_.size()));
  counts_[std::min(k, counts_.size() - 1)] += 1.0;
}

double Histogram::edge(std::size_t k) const {
  return lo_ + (hi_ - lo_) * static_cast<double>(k) / static_cast<double>(counts_.size());
}

double Histogram::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), underflow_ + overflow_);
}

std::vector<double> Histogram::probabilities_with_tails() const {
  std::vector<double> out;
  out.reserve(counts_.size() + 2);
  out.push_back(underflow_);
  out.insert(out.end(), counts_.begin(), counts_.end());
  out.push_back(overflow_);
  const double t = total();
  if (t > 0.0) {
    for (double& v : out) v /= t;
  }
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigurationError("statistics", "total variation needs equal lengths");
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sq = std::accumulate(q.begin(), q.end(), 0.0);
  if (!(sp > 0.0) || !(sq > 0.0)) throw ConfigurationError("statistics", "total variation of an empty distribution");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] / sp - q[i] / sq);
  return 0.5 * acc;
}

std::vector<double> bin_probabilities(const RealField& density, const Histogram& h) {
  const SpatialGrid& g = density.grid();
  if (g.dim() != 1) throw ConfigurationError("statistics", "bin probabilities need a 1D density");
  const std::size_t nb = h.bins();
  std::vector<double> out(nb + 2, 0.0);
  const double dx = g.spacing(0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double a = g.axis(0).lo + static_cast<double>(j) * dx;
    const double b = a + dx;
    const double rho = density[j];
    // Underflow and overflow parts of the cell.
    if (a < h.lo()) out.front() += rho * (std::min(b, h.lo()) - a);
    if (b > h.hi()) out.back() += rho * (b - std::max(a, h.hi()));
    const double lo = std::max(a, h.lo());
    const double hi = std::min(b, h.hi());
    if (!(hi > lo)) continue;
    const double width = (h.hi() - h.lo()) / static_cast<double>(nb);
    auto k0 = static_cast<std::size_t>(std::floor((lo - h.lo()) / width));
    for (std::size_t k = std::min(k0, nb - 1); k < nb; ++k) {
      const double e0 = h.edge(k);
      const double e1 = h.edge(k + 1);
      if (e0 >= hi) break;
      const double overlap = std::min(hi, e1) - std::max(lo, e0);
      if (overlap > 0.0) out[k + 1] += rho * overlap;
    }
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total > 0.0) {
    for (double& v : out) v /= total;
  }
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigurationError("statistics", "KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ConfigurationError("statistics", "KS test needs a non-empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double ne = std::sqrt(n);
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace stochaction
