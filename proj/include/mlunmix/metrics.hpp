#ifndef MLUNMIX_METRICS_HPP
#define MLUNMIX_METRICS_HPP

#include <optional>
#include <vector>

#include "mlunmix/model.hpp"

namespace mlunmix {

/// permutation[i] is the reference index matched to estimate i.
using Permutation = std::vector<Index>;

struct AngleSummary {
  double mean = 0.0;
  double max = 0.0;
};

struct EvalReport {
  Permutation permutation;
  /// Indexed by reference endmember.
  std::vector<double> sad_per_endmember;
  double rms_sad = 0.0;
  /// Present when abundances were evaluated.
  std::optional<AngleSummary> aad_per_pixel_summary;
  std::optional<double> rms_aad;
};

/// Angle between two nonzero vectors in radians, cosine clamped to [-1, 1].
double vector_angle(const Vector& a, const Vector& b);

/// Spectral angle distance.
double sad(const Vector& m, const Vector& m_hat);
/// Abundance angle distance.
double aad(const Vector& a, const Vector& a_hat);

/// Optimal assignment on a square cost matrix (Hungarian method).
/// Returns, for each row, its assigned column.
std::vector<Index> solve_assignment(const Matrix& cost);

/// Pairwise SAD, entry (i, j) = sad(est column i, ref column j).
Matrix sad_matrix(const Matrix& M_ref, const Matrix& M_est);

/// Bijection minimizing total SAD between estimated and reference columns.
Permutation match_endmembers(const EndmemberMatrix& M_ref, const EndmemberMatrix& M_est);

/// sqrt(mean SAD^2) after matching.
double rms_sad(const EndmemberMatrix& M_ref, const EndmemberMatrix& M_est);

/// Rows of S_est reordered so row permutation[i] holds estimate i.
Matrix align_rows(const Matrix& S_est, const Permutation& permutation);

/// sqrt(mean AAD^2) over pixels, after aligning S_est rows by `permutation`.
double rms_aad(const Matrix& S_ref, const Matrix& S_est, const Permutation& permutation);

EvalReport evaluate(const EndmemberMatrix& M_ref, const EndmemberMatrix& M_est,
                    const Matrix* S_ref = nullptr, const Matrix* S_est = nullptr);

}  // namespace mlunmix

#endif  // MLUNMIX_METRICS_HPP
