#ifndef MLUNMIX_FCLS_HPP
#define MLUNMIX_FCLS_HPP

#include <optional>
#include <stdexcept>

#include "mlunmix/model.hpp"

namespace mlunmix {

struct FclsConfig {
  /// Sum-to-one row weight. Unset means 15 * max entry of A.
  std::optional<double> delta;
  int max_active_set_iters = 500;
  /// Optimality tolerance on the NNLS gradient.
  double tol = 1e-10;
  /// Columns whose sum is within this of one are rescaled to sum exactly
  /// one; others are left as solved and flagged.
  double renormalize_below = 1e-4;

  void validate() const;
  double resolved_delta(const Matrix& A) const;
};

class FclsError : public std::runtime_error {
public:
  FclsError(const std::string& what, Vector iterate = {}, Index pixel = -1)
      : std::runtime_error(what), iterate_(std::move(iterate)), pixel_(pixel) {}
  const Vector& iterate() const { return iterate_; }
  /// Pixel index for image-level failures, -1 otherwise.
  Index pixel() const { return pixel_; }

private:
  Vector iterate_;
  Index pixel_;
};

struct NnlsResult {
  Vector x;
  int iterations = 0;
};

/// Lawson-Hanson active-set solve of min ||M x - y||^2 s.t. x >= 0.
NnlsResult nnls(const Matrix& M, const Vector& y, int max_iters, double tol);

struct FclsPixelResult {
  /// Raw minimizer of the augmented problem.
  Vector raw;
  /// Reported abundances: the exact minimizer over the simplex, refined
  /// from raw by an active-set iteration; if that fails, raw rescaled when
  /// its sum is within renormalize_below of one, else raw unchanged.
  Vector abundances;
  bool renormalized = false;
  int iterations = 0;
};

/// [A; delta 1'] and the matching [x; delta] target.
Matrix augmented_system(const Matrix& A, double delta);

FclsPixelResult fcls_pixel_detail(const EndmemberMatrix& A, const Vector& x,
                                  const FclsConfig& cfg);
Vector fcls_pixel(const EndmemberMatrix& A, const Vector& x, const FclsConfig& cfg);

/// Column-wise FCLS. The result is flagged asc_enforced only when every
/// column could be renormalized.
AbundanceMatrix fcls_image(const EndmemberMatrix& A, const ObservationMatrix& X,
                           const FclsConfig& cfg);

}  // namespace mlunmix

#endif  // MLUNMIX_FCLS_HPP
