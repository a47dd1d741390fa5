#ifndef MLUNMIX_MODEL_HPP
#define MLUNMIX_MODEL_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mlunmix {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// "LxP" style shape string for error messages.
std::string shape_string(const Matrix& m);

/// Mixed pixel spectra, one column per pixel (L bands x N pixels).
class ObservationMatrix {
public:
  /// Throws std::invalid_argument on empty, negative or non-finite input.
  explicit ObservationMatrix(Matrix data);

  const Matrix& data() const { return data_; }
  Index band_count() const { return data_.rows(); }
  Index pixel_count() const { return data_.cols(); }

private:
  Matrix data_;
};

/// Endmember signatures, one column per material (L bands x P).
class EndmemberMatrix {
public:
  explicit EndmemberMatrix(Matrix data, std::vector<std::string> names = {});

  const Matrix& data() const { return data_; }
  const std::vector<std::string>& names() const { return names_; }
  Index band_count() const { return data_.rows(); }
  Index endmember_count() const { return data_.cols(); }

private:
  Matrix data_;
  std::vector<std::string> names_;
};

/// Per-pixel abundance fractions (P x N). Always nonnegative; columns sum
/// to one when asc_enforced() is set.
class AbundanceMatrix {
public:
  explicit AbundanceMatrix(Matrix data, bool asc_enforced = false);

  const Matrix& data() const { return data_; }
  bool asc_enforced() const { return asc_enforced_; }
  Index endmember_count() const { return data_.rows(); }
  Index pixel_count() const { return data_.cols(); }

private:
  Matrix data_;
  bool asc_enforced_;
};

struct NoiseSpec {
  /// +infinity disables noise.
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct AbundanceValidation {
  Index negative_count = 0;
  double max_sum_deviation = 0.0;
  bool passed = false;
};

/// Noiseless linear mixing, X = A S.
ObservationMatrix mix(const EndmemberMatrix& A, const AbundanceMatrix& S);

/// Adds white Gaussian noise with variance mean(X.^2) / 10^(snr_db/10),
/// then clamps negative entries to zero.
ObservationMatrix add_noise(const ObservationMatrix& X, const NoiseSpec& spec);

/// 10 log10(mean(clean.^2) / mean(noise.^2)).
double measured_snr_db(const Matrix& clean, const Matrix& noise);

/// Checks ANC and ASC; accepts any matrix so invalid candidates can be reported on.
AbundanceValidation validate_abundances(const Matrix& S, double tol);
AbundanceValidation validate_abundances(const AbundanceMatrix& S, double tol);

/// splitmix64 finalizer; used to derive independent sub-seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace mlunmix

#endif  // MLUNMIX_MODEL_HPP
