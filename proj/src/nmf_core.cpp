#include "mlunmix/nmf_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mlunmix {

void SparsityWeights::validate() const {
  if (!(alpha >= 0.0) || !(lambda >= 0.0) || !std::isfinite(alpha) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sparsity weights must be finite and nonnegative");
  }
}

void LayerFitConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(rel_tol >= 0.0)) throw std::invalid_argument("rel_tol must be >= 0");
  if (!(epsilon_floor > 0.0)) throw std::invalid_argument("epsilon_floor must be > 0");
  if (!(asc_delta > 0.0)) throw std::invalid_argument("asc_delta must be > 0");
}

namespace {

void check_conform(const Matrix& X, const Matrix& A, const Matrix& S, const char* op) {
  if (A.rows() != X.rows() || S.cols() != X.cols() || A.cols() != S.rows()) {
    throw std::invalid_argument(std::string(op) + ": shapes do not conform, X is " +
                                shape_string(X) + ", A is " + shape_string(A) +
                                ", S is " + shape_string(S));
  }
}

Matrix floored(const Matrix& M, double eps) { return M.cwiseMax(eps); }

// Shared multiplicative step: M .* num ./ max(den + weight/2 M.^(-1/2), eps).
Matrix multiplicative_step(const Matrix& M, const Matrix& num, const Matrix& den,
                           double weight, double eps) {
  Matrix out(M.rows(), M.cols());
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      double d = den(i, j);
      if (weight > 0.0) d += 0.5 * weight / std::sqrt(M(i, j));
      out(i, j) = std::max(M(i, j) * num(i, j) / std::max(d, eps), eps);
    }
  }
  return out;
}

// Majorization step: M .* max(num - weight/4 M.^(-1/2), 0) ./ max(den, eps).
// The quadratic term is ||.||_F^2 without a 1/2, so its gradient carries a
// factor 2 that the penalty gradient weight/2 M.^(-1/2) does not.
Matrix descent_step(const Matrix& M, const Matrix& num, const Matrix& den, double weight,
                    double eps) {
  Matrix out(M.rows(), M.cols());
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      double n = num(i, j);
      if (weight > 0.0) n -= 0.25 * weight / std::sqrt(M(i, j));
      out(i, j) = std::max(M(i, j) * std::max(n, 0.0) / std::max(den(i, j), eps), eps);
    }
  }
  return out;
}

struct Terms {
  Matrix num;
  Matrix den;
};

Terms basis_terms(const Matrix& X, const Matrix& Af, const Matrix& S) {
  const Matrix St = S.transpose();
  return Terms{X * St, Af * (S * St)};
}

Terms coefficient_terms(const Matrix& X, const Matrix& A, const Matrix& Sf,
                        const LayerFitConfig& cfg) {
  const Matrix At = A.transpose();
  Matrix num = At * X;
  Matrix gram = At * A;
  if (cfg.asc_augment) {
    // [A; d 1'][A; d 1'] and [A; d 1'][X; d 1'] without forming the stack.
    const double d2 = cfg.asc_delta * cfg.asc_delta;
    num.array() += d2;
    gram.array() += d2;
  }
  return Terms{std::move(num), gram * Sf};
}

}  // namespace

double half_norm(const Matrix& M) {
  double sum = 0.0;
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      if (M(i, j) < 0.0) {
        throw std::domain_error("half_norm: negative entry at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
      }
      sum += std::sqrt(M(i, j));
    }
  }
  return sum;
}

double cost(const Matrix& X, const Matrix& A, const Matrix& S, const SparsityWeights& w) {
  check_conform(X, A, S, "cost");
  double value = (X - A * S).squaredNorm();
  if (w.alpha != 0.0) value += w.alpha * half_norm(A);
  if (w.lambda != 0.0) value += w.lambda * half_norm(S);
  return value;
}

double layer_objective(const Matrix& X, const Matrix& A, const Matrix& S,
                       const SparsityWeights& w, const LayerFitConfig& cfg) {
  double value = cost(X, A, S, w);
  if (cfg.asc_augment) {
    const double d2 = cfg.asc_delta * cfg.asc_delta;
    value += d2 * (S.colwise().sum().array() - 1.0).square().sum();
  }
  return value;
}

Matrix update_A(const Matrix& X, const Matrix& A, const Matrix& S, double alpha,
                const LayerFitConfig& cfg) {
  check_conform(X, A, S, "update_A");
  const Matrix Af = floored(A, cfg.epsilon_floor);
  const Terms t = basis_terms(X, Af, S);
  return multiplicative_step(Af, t.num, t.den, alpha, cfg.epsilon_floor);
}

Matrix update_S(const Matrix& X, const Matrix& A, const Matrix& S, double lambda,
                const LayerFitConfig& cfg) {
  check_conform(X, A, S, "update_S");
  const Matrix Sf = floored(S, cfg.epsilon_floor);
  const Terms t = coefficient_terms(X, A, Sf, cfg);
  return multiplicative_step(Sf, t.num, t.den, lambda, cfg.epsilon_floor);
}

Matrix descent_update_A(const Matrix& X, const Matrix& A, const Matrix& S, double alpha,
                        const LayerFitConfig& cfg) {
  check_conform(X, A, S, "descent_update_A");
  const Matrix Af = floored(A, cfg.epsilon_floor);
  const Terms t = basis_terms(X, Af, S);
  return descent_step(Af, t.num, t.den, alpha, cfg.epsilon_floor);
}

Matrix descent_update_S(const Matrix& X, const Matrix& A, const Matrix& S, double lambda,
                        const LayerFitConfig& cfg) {
  check_conform(X, A, S, "descent_update_S");
  const Matrix Sf = floored(S, cfg.epsilon_floor);
  const Terms t = coefficient_terms(X, A, Sf, cfg);
  return descent_step(Sf, t.num, t.den, lambda, cfg.epsilon_floor);
}

LayerFit fit_layer(const Matrix& X, const Matrix& A0, const Matrix& S0,
                   const SparsityWeights& w, const LayerFitConfig& cfg) {
  check_conform(X, A0, S0, "fit_layer");
  w.validate();
  cfg.validate();

  LayerFit fit{floored(A0, cfg.epsilon_floor), floored(S0, cfg.epsilon_floor), {}};
  auto& values = fit.trace.values;
  values.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);

  const double exact_fit = 1e-20 * std::max(1.0, X.squaredNorm());
  const int window = 10;

  values.push_back(layer_objective(X, fit.A, fit.S, w, cfg));
  if (!std::isfinite(values.back())) {
    throw NonFiniteCostError(0, "fit_layer: non-finite cost at iteration 0");
  }
  for (int k = 1; k <= cfg.max_iters; ++k) {
    Matrix A = update_A(X, fit.A, fit.S, w.alpha, cfg);
    Matrix S = update_S(X, A, fit.S, w.lambda, cfg);
    double current = layer_objective(X, A, S, w, cfg);
    if (!(current <= values.back())) {
      A = descent_update_A(X, fit.A, fit.S, w.alpha, cfg);
      S = descent_update_S(X, A, fit.S, w.lambda, cfg);
      current = layer_objective(X, A, S, w, cfg);
      ++fit.trace.fallback_steps;
    }
    fit.A = std::move(A);
    fit.S = std::move(S);
    if (!std::isfinite(current)) {
      throw NonFiniteCostError(k, "fit_layer: non-finite cost at iteration " +
                                      std::to_string(k));
    }
    values.push_back(current);

    const double reference = values[static_cast<std::size_t>(k - std::min(k, window))];
    const bool stalled = reference - current <= cfg.rel_tol * reference;
    if (current <= exact_fit || stalled) {
      fit.trace.converged_at = k;
      break;
    }
  }
  return fit;
}

double estimate_lambda(const Matrix& X) {
  const double bands = static_cast<double>(X.rows());
  const double root_n = std::sqrt(static_cast<double>(X.cols()));
  if (X.cols() < 2) return 0.0;
  double sum = 0.0;
  for (Index l = 0; l < X.rows(); ++l) {
    const double l2 = X.row(l).norm();
    if (l2 == 0.0) continue;
    const double l1 = X.row(l).lpNorm<1>();
    sum += (root_n - l1 / l2) / (root_n - 1.0);
  }
  return sum / std::sqrt(bands);
}

SparsityWeights default_weights(const Matrix& X) {
  const double lambda = estimate_lambda(X);
  return SparsityWeights{0.1 * lambda, lambda};
}

}  // namespace mlunmix
