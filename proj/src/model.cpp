#include "mlunmix/model.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mlunmix {

std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

namespace {

void require_nonnegative_finite(const Matrix& m, const char* what) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream os;
        os << what << ": entry (" << i << ", " << j << ") = " << v
           << " is not a finite nonnegative value";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

}  // namespace

ObservationMatrix::ObservationMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("observation matrix must be nonempty, got " +
                                shape_string(data_));
  }
  require_nonnegative_finite(data_, "observation matrix");
}

EndmemberMatrix::EndmemberMatrix(Matrix data, std::vector<std::string> names)
    : data_(std::move(data)), names_(std::move(names)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("endmember matrix must be nonempty, got " +
                                shape_string(data_));
  }
  require_nonnegative_finite(data_, "endmember matrix");
  for (Index j = 0; j < data_.cols(); ++j) {
    if ((data_.col(j).array() == 0.0).all()) {
      throw std::invalid_argument("endmember column " + std::to_string(j) +
                                  " is all zero");
    }
  }
  if (!names_.empty() && static_cast<Index>(names_.size()) != data_.cols()) {
    throw std::invalid_argument("endmember names: expected " +
                                std::to_string(data_.cols()) + " labels, got " +
                                std::to_string(names_.size()));
  }
}

AbundanceMatrix::AbundanceMatrix(Matrix data, bool asc_enforced)
    : data_(std::move(data)), asc_enforced_(asc_enforced) {
  require_nonnegative_finite(data_, "abundance matrix");
}

ObservationMatrix mix(const EndmemberMatrix& A, const AbundanceMatrix& S) {
  if (A.endmember_count() != S.endmember_count()) {
    throw std::invalid_argument("mix: inner dimensions disagree, A is " +
                                shape_string(A.data()) + ", S is " +
                                shape_string(S.data()));
  }
  return ObservationMatrix(A.data() * S.data());
}

ObservationMatrix add_noise(const ObservationMatrix& X, const NoiseSpec& spec) {
  if (std::isinf(spec.snr_db) && spec.snr_db > 0) {
    return X;
  }
  if (!std::isfinite(spec.snr_db)) {
    throw std::invalid_argument("add_noise: snr_db must be finite or +inf");
  }
  const double signal_power = X.data().squaredNorm() / static_cast<double>(X.data().size());
  const double sigma = std::sqrt(signal_power / std::pow(10.0, spec.snr_db / 10.0));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix noisy = X.data();
  for (Index j = 0; j < noisy.cols(); ++j) {
    for (Index i = 0; i < noisy.rows(); ++i) {
      noisy(i, j) = std::max(0.0, noisy(i, j) + sigma * gauss(rng));
    }
  }
  return ObservationMatrix(std::move(noisy));
}

double measured_snr_db(const Matrix& clean, const Matrix& noise) {
  return 10.0 * std::log10(clean.squaredNorm() / noise.squaredNorm());
}

AbundanceValidation validate_abundances(const Matrix& S, double tol) {
  AbundanceValidation report;
  report.negative_count = (S.array() < 0.0).count();
  for (Index j = 0; j < S.cols(); ++j) {
    report.max_sum_deviation =
        std::max(report.max_sum_deviation, std::abs(S.col(j).sum() - 1.0));
  }
  report.passed = report.negative_count == 0 && report.max_sum_deviation <= tol;
  return report;
}

AbundanceValidation validate_abundances(const AbundanceMatrix& S, double tol) {
  return validate_abundances(S.data(), tol);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mlunmix
