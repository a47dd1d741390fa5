#include "mlunmix/fcls.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace mlunmix {

void FclsConfig::validate() const {
  if (delta && !(*delta > 0.0)) throw std::invalid_argument("fcls delta must be > 0");
  if (max_active_set_iters < 1) throw std::invalid_argument("max_active_set_iters must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("fcls tol must be >= 0");
}

double FclsConfig::resolved_delta(const Matrix& A) const {
  if (delta) return *delta;
  const double peak = A.maxCoeff();
  return peak > 0.0 ? 15.0 * peak : 15.0;
}

NnlsResult nnls(const Matrix& M, const Vector& y, int max_iters, double tol) {
  const Index n = M.cols();
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vector x = Vector::Zero(n);
  Vector w = M.transpose() * (y - M * x);
  const double scaled_tol = tol * std::max(1.0, w.cwiseAbs().maxCoeff());

  // Least squares restricted to the passive columns; other entries zero.
  auto solve_passive = [&]() {
    std::vector<Index> cols;
    for (Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Matrix sub(M.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Index>(k)) = M.col(cols[k]);
    const Vector zs = sub.colPivHouseholderQr().solve(y);
    Vector z = Vector::Zero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zs(static_cast<Index>(k));
    return z;
  };

  int iterations = 0;
  while (true) {
    Index entering = -1;
    double best = scaled_tol;
    for (Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        entering = j;
      }
    }
    if (entering < 0) break;
    passive[static_cast<std::size_t>(entering)] = true;

    while (true) {
      if (++iterations > max_iters) {
        throw FclsError("nnls: no convergence within " + std::to_string(max_iters) +
                            " active-set iterations",
                        x);
      }
      const Vector z = solve_passive();
      bool feasible = true;
      for (Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      double step = 1.0;
      for (Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
          step = std::min(step, x(j) / (x(j) - z(j)));
        }
      }
      x += step * (z - x);
      for (Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    w = M.transpose() * (y - M * x);
  }
  return NnlsResult{std::move(x), iterations};
}

Matrix augmented_system(const Matrix& A, double delta) {
  Matrix M(A.rows() + 1, A.cols());
  M.topRows(A.rows()) = A;
  M.bottomRows(1).setConstant(delta);
  return M;
}

namespace {

void require_full_column_rank(const Matrix& A) {
  if (A.cols() > A.rows()) {
    throw FclsError("fcls: endmember matrix " + shape_string(A) +
                    " has more columns than bands");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  if (qr.rank() < A.cols()) {
    throw FclsError("fcls: endmember matrix is rank deficient (rank " +
                    std::to_string(qr.rank()) + " < " + std::to_string(A.cols()) + ")");
  }
}

// Minimizer of ||A s - x||^2 over the simplex, by an active-set iteration
// started from the augmented solution rescaled onto the simplex. Each
// subproblem is the equality-constrained least squares on the free set F,
//   [2 A_F'A_F  1; 1' 0] [s_F; mu] = [2 A_F'x; 1].
// Returns nothing if the start is unusable or the iteration budget runs out.
std::optional<Vector> simplex_refine(const Matrix& A, const Vector& x, const Vector& start,
                                     int max_iters, double tol) {
  const Index P = A.cols();
  const double total = start.sum();
  if (!(total > 0.0)) return std::nullopt;
  Vector s = start / total;
  std::vector<bool> free(static_cast<std::size_t>(P));
  for (Index j = 0; j < P; ++j) free[static_cast<std::size_t>(j)] = s(j) > 0.0;

  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<Index> cols;
    for (Index j = 0; j < P; ++j) {
      if (free[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    const Index k = static_cast<Index>(cols.size());
    Matrix AF(A.rows(), k);
    for (Index i = 0; i < k; ++i) AF.col(i) = A.col(cols[static_cast<std::size_t>(i)]);
    Matrix K = Matrix::Zero(k + 1, k + 1);
    K.topLeftCorner(k, k) = 2.0 * AF.transpose() * AF;
    K.topRightCorner(k, 1).setOnes();
    K.bottomLeftCorner(1, k).setOnes();
    Vector rhs(k + 1);
    rhs.head(k) = 2.0 * AF.transpose() * x;
    rhs(k) = 1.0;
    const Vector sol = K.colPivHouseholderQr().solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    Vector z = Vector::Zero(P);
    for (Index i = 0; i < k; ++i) z(cols[static_cast<std::size_t>(i)]) = sol(i);

    if (sol.head(k).minCoeff() > 0.0) {
      s = z;
      const double mu = sol(k);
      const Vector g = 2.0 * A.transpose() * (A * s - x);
      const double slack = tol * std::max(1.0, g.cwiseAbs().maxCoeff());
      Index entering = -1;
      double worst = -slack;
      for (Index j = 0; j < P; ++j) {
        if (!free[static_cast<std::size_t>(j)] && g(j) + mu < worst) {
          worst = g(j) + mu;
          entering = j;
        }
      }
      if (entering < 0) return s / s.sum();
      free[static_cast<std::size_t>(entering)] = true;
      continue;
    }
    // Step toward z until the first free entry reaches zero, then drop it.
    double step = 1.0;
    for (Index j = 0; j < P; ++j) {
      if (free[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
        step = std::min(step, s(j) / (s(j) - z(j)));
      }
    }
    s += step * (z - s);
    for (Index j = 0; j < P; ++j) {
      if (free[static_cast<std::size_t>(j)] && s(j) <= 1e-15) {
        free[static_cast<std::size_t>(j)] = false;
        s(j) = 0.0;
      }
    }
  }
  return std::nullopt;
}

FclsPixelResult solve_pixel(const Matrix& A, const Matrix& M, const Vector& x, double delta,
                            const FclsConfig& cfg) {
  Vector y(x.size() + 1);
  y.head(x.size()) = x;
  y(x.size()) = delta;
  NnlsResult solved = nnls(M, y, cfg.max_active_set_iters, cfg.tol);

  FclsPixelResult result;
  result.raw = std::move(solved.x);
  result.iterations = solved.iterations;
  if (auto exact = simplex_refine(A, x, result.raw, cfg.max_active_set_iters, 1e-8)) {
    result.abundances = std::move(*exact);
    result.renormalized = true;
    return result;
  }
  const double total = result.raw.sum();
  if (total > 0.0 && std::abs(total - 1.0) < cfg.renormalize_below) {
    result.abundances = result.raw / total;
    result.renormalized = true;
  } else {
    result.abundances = result.raw;
  }
  return result;
}

}  // namespace

FclsPixelResult fcls_pixel_detail(const EndmemberMatrix& A, const Vector& x,
                                  const FclsConfig& cfg) {
  cfg.validate();
  if (x.size() != A.band_count()) {
    throw std::invalid_argument("fcls_pixel: spectrum has " + std::to_string(x.size()) +
                                " bands, endmembers have " +
                                std::to_string(A.band_count()));
  }
  require_full_column_rank(A.data());
  const double delta = cfg.resolved_delta(A.data());
  return solve_pixel(A.data(), augmented_system(A.data(), delta), x, delta, cfg);
}

Vector fcls_pixel(const EndmemberMatrix& A, const Vector& x, const FclsConfig& cfg) {
  return fcls_pixel_detail(A, x, cfg).abundances;
}

AbundanceMatrix fcls_image(const EndmemberMatrix& A, const ObservationMatrix& X,
                           const FclsConfig& cfg) {
  cfg.validate();
  if (X.band_count() != A.band_count()) {
    throw std::invalid_argument("fcls_image: X is " + shape_string(X.data()) +
                                ", A is " + shape_string(A.data()));
  }
  require_full_column_rank(A.data());
  const double delta = cfg.resolved_delta(A.data());

  const Matrix M = augmented_system(A.data(), delta);

  Matrix S(A.endmember_count(), X.pixel_count());
  bool all_renormalized = true;
  for (Index j = 0; j < X.pixel_count(); ++j) {
    try {
      FclsPixelResult r = solve_pixel(A.data(), M, X.data().col(j), delta, cfg);
      S.col(j) = r.abundances;
      all_renormalized = all_renormalized && r.renormalized;
    } catch (const FclsError& e) {
      throw FclsError(std::string(e.what()) + " (pixel " + std::to_string(j) + ")",
                      e.iterate(), j);
    }
  }
  return AbundanceMatrix(std::move(S), all_renormalized);
}

}  // namespace mlunmix
