#include "stochaction/banded.hpp"

#include <algorithm>
#include <cmath>

namespace stochaction {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), data_(n * (2 * bandwidth + 1), Complex{0.0, 0.0}) {
  if (n == 0) throw ConfigurationError("quantum_solver", "empty band matrix");
}

Complex& BandedMatrix::at(std::size_t row, std::size_t col) {
  if (row >= n_ || col >= n_ || (col > row + bw_) || (row > col + bw_)) {
    throw ConfigurationError("quantum_solver", "band matrix entry outside the band");
  }
  return data_[index(row, col)];
}

Complex BandedMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= n_ || col >= n_ || (col > row + bw_) || (row > col + bw_)) return {0.0, 0.0};
  return data_[index(row, col)];
}

void BandedMatrix::factorize() {
  for (std::size_t k = 0; k < n_; ++k) {
    const Complex pivot = data_[index(k, k)];
    if (!(std::abs(pivot) > 1e-300)) throw NumericalError("quantum_solver", "vanishing pivot in band factorization");
    const std::size_t last = std::min(n_ - 1, k + bw_);
    for (std::size_t i = k + 1; i <= last; ++i) {
      Complex& lik = data_[index(i, k)];
      if (lik == Complex{0.0, 0.0}) continue;
      lik /= pivot;
      const Complex l = lik;
      Complex* row_i = &data_[index(i, k + 1)];
      const Complex* row_k = &data_[index(k, k + 1)];
      for (std::size_t j = 0; j + k + 1 <= last; ++j) row_i[j] -= l * row_k[j];
    }
  }
  factorized_ = true;
}

void BandedMatrix::solve(std::span<Complex> rhs) const {
  if (!factorized_) throw NumericalError("quantum_solver", "band matrix used before factorization");
  if (rhs.size() != n_) throw ConfigurationError("quantum_solver", "right-hand side has the wrong length");
  for (std::size_t i = 1; i < n_; ++i) {
    const std::size_t first = i > bw_ ? i - bw_ : 0;
    Complex acc = rhs[i];
    for (std::size_t j = first; j < i; ++j) acc -= data_[index(i, j)] * rhs[j];
    rhs[i] = acc;
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t last = std::min(n_ - 1, ii + bw_);
    Complex acc = rhs[ii];
    for (std::size_t j = ii + 1; j <= last; ++j) acc -= data_[index(ii, j)] * rhs[j];
    rhs[ii] = acc / data_[index(ii, ii)];
  }
}

CyclicBandedSystem::CyclicBandedSystem(BandedMatrix band, Complex corner_top_right, Complex corner_bottom_left)
    : band_(std::move(band)), alpha_(corner_top_right), beta_(corner_bottom_left) {
  const std::size_t n = band_.size();
  if (n < 3) throw ConfigurationError("quantum_solver", "cyclic system needs at least 3 unknowns");
  // A = T' + u v^T with u = (gamma, 0.., beta), v = (1, 0.., alpha / gamma).
  gamma_ = -band_.at(0, 0);
  if (std::abs(gamma_) < 1e-300) gamma_ = Complex{-1.0, 0.0};
  band_.at(0, 0) -= gamma_;
  band_.at(n - 1, n - 1) -= alpha_ * beta_ / gamma_;
  band_.factorize();
  z_.assign(n, Complex{0.0, 0.0});
  z_.front() = gamma_;
  z_.back() = beta_;
  band_.solve(z_);
}

void CyclicBandedSystem::solve(std::span<Complex> rhs) const {
  band_.solve(rhs);
  const std::size_t n = rhs.size();
  const Complex vy = rhs[0] + alpha_ / gamma_ * rhs[n - 1];
  const Complex vz = z_[0] + alpha_ / gamma_ * z_[n - 1];
  const Complex factor = vy / (Complex{1.0, 0.0} + vz);
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= factor * z_[i];
}

}  // namespace stochaction
