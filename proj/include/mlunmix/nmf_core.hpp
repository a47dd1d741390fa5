#ifndef MLUNMIX_NMF_CORE_HPP
#define MLUNMIX_NMF_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlunmix/model.hpp"

namespace mlunmix {

struct SparsityWeights {
  double alpha = 0.0;   ///< weight on the half-norm of the basis
  double lambda = 0.0;  ///< weight on the half-norm of the coefficients

  void validate() const;
};

struct LayerFitConfig {
  int max_iters = 300;
  /// Convergence when the cost drops by less than rel_tol (relative) over
  /// the last min(k, 10) iterations.
  double rel_tol = 1e-6;
  double epsilon_floor = 1e-9;
  /// Sum-to-one pressure for the coefficient update: X and A gain a constant
  /// row of asc_delta. Disabled when asc_augment is false.
  bool asc_augment = true;
  double asc_delta = 15.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CostTrace {
  /// values[0] is the cost at the initial point, values[k] after k iterations.
  std::vector<double> values;
  std::optional<int> converged_at;
  /// Iterations where the plain rules raised the objective and the
  /// majorization step was used instead.
  int fallback_steps = 0;
};

struct LayerFit {
  Matrix A;
  Matrix S;
  CostTrace trace;
};

/// Raised when the objective stops being finite.
class NonFiniteCostError : public std::runtime_error {
public:
  NonFiniteCostError(int iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

private:
  int iteration_;
};

/// Sum of elementwise square roots (L1/2 quasi-norm term).
double half_norm(const Matrix& M);

/// ||X - A S||_F^2 + alpha * half_norm(A) + lambda * half_norm(S).
double cost(const Matrix& X, const Matrix& A, const Matrix& S, const SparsityWeights& w);

/// The quantity fit_layer actually minimizes: cost() plus
/// asc_delta^2 * ||1'S - 1'||^2 when the sum-to-one augmentation is on.
double layer_objective(const Matrix& X, const Matrix& A, const Matrix& S,
                       const SparsityWeights& w, const LayerFitConfig& cfg);

/// A <- A .* (X S') ./ (A S S' + alpha/2 A.^(-1/2)), floored at epsilon.
Matrix update_A(const Matrix& X, const Matrix& A, const Matrix& S, double alpha,
                const LayerFitConfig& cfg);

/// S <- S .* (A' X) ./ (A' A S + lambda/2 S.^(-1/2)), floored at epsilon,
/// applied to the row-augmented system when cfg.asc_augment is set.
Matrix update_S(const Matrix& X, const Matrix& A, const Matrix& S, double lambda,
                const LayerFitConfig& cfg);

/// Majorization-minimization steps for layer_objective: the penalty
/// gradient is subtracted from the numerator, A .* max(X S' - alpha/4
/// A.^(-1/2), 0) ./ (A S S'), floored at epsilon. The plain rules' alpha/2
/// matches a 1/2-scaled data term; these match cost() as written and never
/// increase layer_objective.
Matrix descent_update_A(const Matrix& X, const Matrix& A, const Matrix& S, double alpha,
                        const LayerFitConfig& cfg);
Matrix descent_update_S(const Matrix& X, const Matrix& A, const Matrix& S, double lambda,
                        const LayerFitConfig& cfg);

/// Alternating multiplicative updates on one layer. An iteration that would
/// raise the objective is redone with the descent_update_* pair, so the
/// trace never increases.
LayerFit fit_layer(const Matrix& X, const Matrix& A0, const Matrix& S0,
                   const SparsityWeights& w, const LayerFitConfig& cfg);

/// Row-sparseness estimate of lambda:
/// (1/sqrt(L)) * sum_l (sqrt(N) - |x_l|_1 / |x_l|_2) / (sqrt(N) - 1).
double estimate_lambda(const Matrix& X);

/// lambda from estimate_lambda, alpha = 0.1 * lambda.
SparsityWeights default_weights(const Matrix& X);

}  // namespace mlunmix

#endif  // MLUNMIX_NMF_CORE_HPP
