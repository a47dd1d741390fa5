#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "mlunmix/nmf_core.hpp"
#include "support.hpp"

using namespace mlunmix;

namespace {

LayerFitConfig plain_config() {
  LayerFitConfig cfg;
  cfg.asc_augment = false;
  return cfg;
}

double loop_half_norm(const Matrix& M) {
  double s = 0.0;
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) s += std::sqrt(M(i, j));
  return s;
}

double loop_frobenius_sq(const Matrix& X, const Matrix& A, const Matrix& S) {
  double s = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      double r = X(i, j);
      for (Index k = 0; k < A.cols(); ++k) r -= A(i, k) * S(k, j);
      s += r * r;
    }
  }
  return s;
}

// Classical Euclidean multiplicative rule for the right factor, written
// entry by entry: H_kj * (W'V)_kj / (W'WH)_kj.
Matrix oracle_right_update(const Matrix& V, const Matrix& W, const Matrix& H) {
  Matrix out(H.rows(), H.cols());
  for (Index k = 0; k < H.rows(); ++k) {
    for (Index j = 0; j < H.cols(); ++j) {
      double num = 0.0;
      for (Index i = 0; i < V.rows(); ++i) num += W(i, k) * V(i, j);
      double den = 0.0;
      for (Index q = 0; q < H.rows(); ++q) {
        double wtw = 0.0;
        for (Index i = 0; i < W.rows(); ++i) wtw += W(i, k) * W(i, q);
        den += wtw * H(q, j);
      }
      out(k, j) = H(k, j) * num / den;
    }
  }
  return out;
}

// Left-factor rule via the transposed problem V' ~ H' W'.
Matrix oracle_left_update(const Matrix& V, const Matrix& W, const Matrix& H) {
  return oracle_right_update(V.transpose(), H.transpose(), W.transpose()).transpose();
}

}  // namespace

TEST_CASE("half_norm") {
  CHECK(half_norm(Matrix::Zero(3, 4)) == 0.0);
  Matrix m(2, 2);
  m << 4, 9, 0, 1;
  CHECK(half_norm(m) == 6.0);

  std::mt19937_64 rng(1);
  const Matrix r = test::random_positive(3, 3, rng, 0.0, 1.0);
  CHECK(std::abs(half_norm(r) - loop_half_norm(r)) < 1e-12);

  m(1, 0) = -1e-12;
  CHECK_THROWS_AS(half_norm(m), std::domain_error);
}

TEST_CASE("cost: hand values and special cases") {
  std::mt19937_64 rng(2);
  const Matrix A = test::random_positive(4, 3, rng);
  const Matrix S = test::random_positive(3, 6, rng);
  CHECK(cost(A * S, A, S, {0.0, 0.0}) < 1e-24);

  const Matrix X2 = Matrix::Constant(1, 1, 2.0);
  const Matrix one = Matrix::Ones(1, 1);
  CHECK(cost(X2, one, one, {1.0, 4.0}) == doctest::Approx(6.0).epsilon(1e-15));

  CHECK_THROWS_AS(cost(Matrix::Ones(4, 5), A, S, {}), std::invalid_argument);
}

TEST_CASE("cost: compositional oracle on a random instance") {
  std::mt19937_64 rng(3);
  const Matrix X = test::random_positive(4, 6, rng);
  const Matrix A = test::random_positive(4, 3, rng);
  const Matrix S = test::random_positive(3, 6, rng);
  const SparsityWeights w{0.3, 0.7};
  const double oracle = loop_frobenius_sq(X, A, S) + 0.3 * loop_half_norm(A) + 0.7 * loop_half_norm(S);
  CHECK(std::abs(cost(X, A, S, w) - oracle) < 1e-10);

  // Plain Frobenius objective with both weights off; abundance-only sparsity with alpha off.
  CHECK(std::abs(cost(X, A, S, {0, 0}) - loop_frobenius_sq(X, A, S)) < 1e-12);
  CHECK(std::abs(cost(X, A, S, {0, 0.7}) - (loop_frobenius_sq(X, A, S) + 0.7 * loop_half_norm(S))) < 1e-12);
}

TEST_CASE("cost: scale consistency of the unregularized objective") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const Matrix X = test::random_positive(5, 8, rng);
    const Matrix A = test::random_positive(5, 2, rng);
    const Matrix S = test::random_positive(2, 8, rng);
    const double c = 0.5 + t;
    const double base = cost(X, A, S, {});
    CHECK(cost(c * X, c * A, S, {}) == doctest::Approx(c * c * base).epsilon(1e-12));
  }
}

TEST_CASE("update_A: fixed point, classical oracle, descent") {
  std::mt19937_64 rng(5);
  const auto cfg = plain_config();
  const Matrix A = test::random_positive(6, 3, rng);
  const Matrix S = test::random_positive(3, 9, rng);
  CHECK(test::max_abs_diff(update_A(A * S, A, S, 0.0, cfg), A) < 1e-10);

  const Matrix X = test::random_positive(6, 9, rng);
  CHECK(test::max_abs_diff(update_A(X, A, S, 0.0, cfg), oracle_left_update(X, A, S)) < 1e-10);

  const Matrix X3 = test::random_positive(3, 5, rng);
  const Matrix A3 = test::random_positive(3, 2, rng);
  const Matrix S3 = test::random_positive(2, 5, rng);
  const SparsityWeights w{0.1, 0.0};
  CHECK(cost(X3, update_A(X3, A3, S3, 0.1, cfg), S3, w) <= cost(X3, A3, S3, w) + 1e-9);
}

TEST_CASE("update_S: fixed point, classical oracle, descent") {
  std::mt19937_64 rng(6);
  const auto cfg = plain_config();
  const Matrix A = test::random_positive(6, 3, rng);
  const Matrix S = test::random_positive(3, 9, rng);
  CHECK(test::max_abs_diff(update_S(A * S, A, S, 0.0, cfg), S) < 1e-10);

  const Matrix X = test::random_positive(6, 9, rng);
  CHECK(test::max_abs_diff(update_S(X, A, S, 0.0, cfg), oracle_right_update(X, A, S)) < 1e-10);

  const Matrix X3 = test::random_positive(3, 5, rng);
  const Matrix A3 = test::random_positive(3, 2, rng);
  const Matrix S3 = test::random_positive(2, 5, rng);
  const SparsityWeights w{0.0, 0.1};
  CHECK(cost(X3, A3, update_S(X3, A3, S3, 0.1, cfg), w) <= cost(X3, A3, S3, w) + 1e-9);
}

TEST_CASE("update_S: augmentation equals the rule on explicitly stacked matrices") {
  std::mt19937_64 rng(7);
  LayerFitConfig cfg;
  cfg.asc_delta = 3.0;
  const Matrix X = test::random_positive(5, 8, rng);
  const Matrix A = test::random_positive(5, 3, rng);
  const Matrix S = test::random_positive(3, 8, rng);
  Matrix Xs(6, 8), As(6, 3);
  Xs << X, Matrix::Constant(1, 8, 3.0);
  As << A, Matrix::Constant(1, 3, 3.0);
  CHECK(test::max_abs_diff(update_S(X, A, S, 0.0, cfg), oracle_right_update(Xs, As, S)) < 1e-10);
}

TEST_CASE("updates preserve nonnegativity and the epsilon floor") {
  std::mt19937_64 rng(8);
  LayerFitConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const Matrix X = test::random_positive(7, 11, rng, 0.0, 1.0);
    Matrix A = test::random_positive(7, 3, rng, 0.0, 1.0);
    Matrix S = test::random_positive(3, 11, rng, 0.0, 1.0);
    A(0, 0) = 0.0;
    S(1, 2) = 0.0;
    const double weight = (t % 3) * 0.5;
    cfg.asc_augment = t % 2 == 0;
    CHECK(update_A(X, A, S, weight, cfg).minCoeff() >= cfg.epsilon_floor);
    CHECK(update_S(X, A, S, weight, cfg).minCoeff() >= cfg.epsilon_floor);
  }
}

TEST_CASE("fit_layer: exact start converges immediately") {
  std::mt19937_64 rng(9);
  const Matrix A0 = test::random_positive(8, 3, rng);
  const Matrix S0 = test::random_positive(3, 12, rng);
  const LayerFit fit = fit_layer(A0 * S0, A0, S0, {}, plain_config());
  REQUIRE(fit.trace.converged_at.has_value());
  CHECK(*fit.trace.converged_at == 1);
  CHECK(fit.trace.values.back() < 1e-10);
}

TEST_CASE("fit_layer: recovers a rank-2 nonnegative matrix") {
  std::mt19937_64 rng(10);
  const Matrix W = test::random_positive(20, 2, rng);
  const Matrix H = test::random_positive(2, 50, rng);
  const Matrix X = W * H;
  auto cfg = plain_config();
  cfg.max_iters = 500;
  cfg.rel_tol = 0.0;
  const LayerFit fit = fit_layer(X, test::random_positive(20, 2, rng), test::random_positive(2, 50, rng), {}, cfg);
  CHECK((X - fit.A * fit.S).norm() / X.norm() < 1e-3);
}

TEST_CASE("fit_layer: bitwise deterministic and monotone") {
  std::mt19937_64 rng(11);
  const Matrix X = test::random_positive(12, 40, rng);
  const Matrix A0 = test::random_positive(12, 4, rng);
  const Matrix S0 = test::random_positive(4, 40, rng);
  LayerFitConfig cfg;
  cfg.max_iters = 100;
  const SparsityWeights w{0.1, 0.1};
  const LayerFit a = fit_layer(X, A0, S0, w, cfg);
  const LayerFit b = fit_layer(X, A0, S0, w, cfg);
  CHECK(a.trace.values == b.trace.values);
  CHECK(a.A == b.A);
  CHECK(a.S == b.S);
  for (std::size_t k = 1; k < a.trace.values.size(); ++k) {
    CHECK(a.trace.values[k] <= a.trace.values[k - 1] + 1e-9);
  }
}

TEST_CASE("fit_layer: trace descends across random seeded instances") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> dimL(2, 20), dimN(2, 100), dimP(1, 5);
  for (int t = 0; t < 50; ++t) {
    const Index L = dimL(rng), N = dimN(rng);
    const Index P = std::min<Index>(dimP(rng), std::min(L, N));
    const Matrix X = test::random_positive(L, N, rng, 0.0, 1.0);
    LayerFitConfig cfg;
    cfg.max_iters = 60;
    cfg.asc_augment = t % 2 == 0;
    const double weights[] = {0.0, 0.1, 1.0};
    const SparsityWeights w{weights[t % 3], weights[(t / 3) % 3]};
    const LayerFit fit = fit_layer(X, test::random_positive(L, P, rng), test::random_positive(P, N, rng), w, cfg);
    for (std::size_t k = 1; k < fit.trace.values.size(); ++k) {
      REQUIRE(fit.trace.values[k] <= fit.trace.values[k - 1] + 1e-9);
    }
  }
}

TEST_CASE("fit_layer: non-finite cost reports the iteration") {
  Matrix X = Matrix::Ones(3, 4);
  X(0, 0) = 1e200;
  try {
    fit_layer(X, Matrix::Ones(3, 2), Matrix::Ones(2, 4), {}, plain_config());
    FAIL("expected NonFiniteCostError");
  } catch (const NonFiniteCostError& e) {
    CHECK(e.iteration() == 0);
  }
}

TEST_CASE("fit_layer: configuration validation") {
  const Matrix X = Matrix::Ones(3, 4);
  LayerFitConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(fit_layer(X, Matrix::Ones(3, 2), Matrix::Ones(2, 4), {}, bad), std::invalid_argument);
  CHECK_THROWS_AS(fit_layer(X, Matrix::Ones(3, 2), Matrix::Ones(2, 4), {-1.0, 0.0}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_layer(X, Matrix::Ones(3, 2), Matrix::Ones(3, 4), {}, {}), std::invalid_argument);
}

TEST_CASE("estimate_lambda") {
  // Constant rows are not sparse at all.
  CHECK(estimate_lambda(Matrix::Constant(4, 25, 0.3)) == doctest::Approx(0.0).epsilon(1e-12));
  // One nonzero per row: each band contributes exactly 1.
  Matrix spike = Matrix::Zero(4, 25);
  for (Index l = 0; l < 4; ++l) spike(l, l) = 2.0;
  CHECK(estimate_lambda(spike) == doctest::Approx(4.0 / 2.0).epsilon(1e-12));

  const SparsityWeights w = default_weights(spike);
  CHECK(w.alpha == doctest::Approx(0.1 * w.lambda));
}

TEST_CASE("descent updates never raise the layer objective") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const Matrix X = test::random_positive(6, 15, rng, 0.0, 1.0);
    const Matrix A = test::random_positive(6, 3, rng, 0.0, 1.0).cwiseMax(1e-9);
    const Matrix S = test::random_positive(3, 15, rng, 0.0, 1.0).cwiseMax(1e-9);
    LayerFitConfig cfg;
    cfg.asc_augment = t % 2 == 1;
    const SparsityWeights w{(t % 4) * 0.5, (t % 5) * 0.5};
    const double before = layer_objective(X, A, S, w, cfg);
    const Matrix A1 = descent_update_A(X, A, S, w.alpha, cfg);
    const double mid = layer_objective(X, A1, S, w, cfg);
    CHECK(mid <= before + 1e-12 * before);
    const Matrix S1 = descent_update_S(X, A1, S, w.lambda, cfg);
    CHECK(layer_objective(X, A1, S1, w, cfg) <= mid + 1e-12 * mid);
  }
}

TEST_CASE("descent updates agree with the plain rules when unregularized") {
  std::mt19937_64 rng(14);
  LayerFitConfig cfg;
  const Matrix X = test::random_positive(6, 15, rng);
  const Matrix A = test::random_positive(6, 3, rng);
  const Matrix S = test::random_positive(3, 15, rng);
  CHECK(test::max_abs_diff(descent_update_A(X, A, S, 0.0, cfg), update_A(X, A, S, 0.0, cfg)) < 1e-14);
  CHECK(test::max_abs_diff(descent_update_S(X, A, S, 0.0, cfg), update_S(X, A, S, 0.0, cfg)) < 1e-14);
}
