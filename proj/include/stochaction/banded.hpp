#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stochaction/grid.hpp"

namespace stochaction {

// Complex band matrix with equal lower and upper bandwidth, factorized by
// Gaussian elimination without pivoting. Intended for I + i tau H and
// H - sigma with H Hermitian, where elimination without pivoting is stable.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

  Complex& at(std::size_t row, std::size_t col);
  Complex at(std::size_t row, std::size_t col) const;

  // In-place LU. Throws NumericalError on a vanishing pivot.
  void factorize();
  bool factorized() const { return factorized_; }
  // Overwrites rhs with the solution.
  void solve(std::span<Complex> rhs) const;

 private:
  std::size_t index(std::size_t row, std::size_t col) const { return row * (2 * bw_ + 1) + (col + bw_ - row); }

  std::size_t n_;
  std::size_t bw_;
  std::vector<Complex> data_;
  bool factorized_ = false;
};

// Banded matrix plus two corner entries A[0][n-1] and A[n-1][0] (periodic
// 1D operators), solved with the Sherman-Morrison correction.
class CyclicBandedSystem {
 public:
  CyclicBandedSystem(BandedMatrix band, Complex corner_top_right, Complex corner_bottom_left);
  void solve(std::span<Complex> rhs) const;

 private:
  BandedMatrix band_;
  Complex alpha_;
  Complex beta_;
  Complex gamma_;
  std::vector<Complex> z_;  // T^-1 u
};

}  // namespace stochaction
