// Shared helpers for the unit and acceptance suites.
#ifndef MLUNMIX_TESTS_SUPPORT_HPP
#define MLUNMIX_TESTS_SUPPORT_HPP

#include <random>

#include "mlunmix/model.hpp"

namespace mlunmix::test {

inline Matrix random_positive(Index rows, Index cols, std::mt19937_64& rng, double lo = 0.05,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = u(rng);
  return M;
}

/// Columns drawn uniformly from the probability simplex.
inline Matrix random_simplex(Index rows, Index cols, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Matrix S(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) S(i, j) = e(rng);
    S.col(j) /= S.col(j).sum();
  }
  return S;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace mlunmix::test

#endif  // MLUNMIX_TESTS_SUPPORT_HPP
