#include "mlunmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mlunmix {

double vector_angle(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("angle: vector lengths differ (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() == 0) throw std::invalid_argument("angle: empty vectors");
  const double sa = a.cwiseAbs().maxCoeff();
  const double sb = b.cwiseAbs().maxCoeff();
  if (!(sa > 0.0) || !(sb > 0.0)) {
    throw std::invalid_argument("angle: undefined for a zero vector");
  }
  // Rescale first so tiny or huge entries cannot underflow the norms.
  const Vector ua = a / sa;
  const Vector ub = b / sb;
  const double c = std::clamp(ua.dot(ub) / (ua.norm() * ub.norm()), -1.0, 1.0);
  return std::acos(c);
}

double sad(const Vector& m, const Vector& m_hat) { return vector_angle(m, m_hat); }

double aad(const Vector& a, const Vector& a_hat) { return vector_angle(a, a_hat); }

std::vector<Index> solve_assignment(const Matrix& cost) {
  // Potentials-based Hungarian method, O(n^3), 1-based internally.
  const Index n = cost.rows();
  if (cost.cols() != n) {
    throw std::invalid_argument("assignment: cost matrix must be square, got " +
                                shape_string(cost));
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const Index i0 = match[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> assignment(n);
  for (Index j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

Matrix sad_matrix(const Matrix& M_ref, const Matrix& M_est) {
  Matrix angles(M_est.cols(), M_ref.cols());
  for (Index i = 0; i < M_est.cols(); ++i) {
    for (Index j = 0; j < M_ref.cols(); ++j) angles(i, j) = sad(M_ref.col(j), M_est.col(i));
  }
  return angles;
}

Permutation match_endmembers(const EndmemberMatrix& M_ref, const EndmemberMatrix& M_est) {
  if (M_ref.data().rows() != M_est.data().rows() || M_ref.data().cols() != M_est.data().cols()) {
    throw std::invalid_argument("match_endmembers: reference is " + shape_string(M_ref.data()) +
                                ", estimate is " + shape_string(M_est.data()));
  }
  return solve_assignment(sad_matrix(M_ref.data(), M_est.data()));
}

double rms_sad(const EndmemberMatrix& M_ref, const EndmemberMatrix& M_est) {
  const Permutation perm = match_endmembers(M_ref, M_est);
  double sum = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const double angle = sad(M_ref.data().col(perm[i]), M_est.data().col(static_cast<Index>(i)));
    sum += angle * angle;
  }
  return std::sqrt(sum / static_cast<double>(perm.size()));
}

Matrix align_rows(const Matrix& S_est, const Permutation& permutation) {
  if (static_cast<Index>(permutation.size()) != S_est.rows()) {
    throw std::invalid_argument("align_rows: permutation has " +
                                std::to_string(permutation.size()) + " entries for " +
                                std::to_string(S_est.rows()) + " rows");
  }
  Matrix aligned(S_est.rows(), S_est.cols());
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    aligned.row(permutation[i]) = S_est.row(static_cast<Index>(i));
  }
  return aligned;
}

namespace {

std::vector<double> per_pixel_aad(const Matrix& S_ref, const Matrix& S_est,
                                  const Permutation& permutation) {
  if (S_ref.rows() != S_est.rows() || S_ref.cols() != S_est.cols()) {
    throw std::invalid_argument("rms_aad: reference is " + shape_string(S_ref) +
                                ", estimate is " + shape_string(S_est));
  }
  const Matrix aligned = align_rows(S_est, permutation);
  std::vector<double> angles(static_cast<std::size_t>(S_ref.cols()));
  for (Index j = 0; j < S_ref.cols(); ++j) {
    if (S_ref.col(j).isZero(0.0) || aligned.col(j).isZero(0.0)) {
      throw std::invalid_argument("rms_aad: abundance column " + std::to_string(j) + " is zero");
    }
    angles[static_cast<std::size_t>(j)] = aad(S_ref.col(j), aligned.col(j));
  }
  return angles;
}

}  // namespace

double rms_aad(const Matrix& S_ref, const Matrix& S_est, const Permutation& permutation) {
  const std::vector<double> angles = per_pixel_aad(S_ref, S_est, permutation);
  double sum = 0.0;
  for (double a : angles) sum += a * a;
  return std::sqrt(sum / static_cast<double>(angles.size()));
}

EvalReport evaluate(const EndmemberMatrix& M_ref, const EndmemberMatrix& M_est,
                    const Matrix* S_ref, const Matrix* S_est) {
  EvalReport report;
  report.permutation = match_endmembers(M_ref, M_est);
  report.sad_per_endmember.assign(report.permutation.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < report.permutation.size(); ++i) {
    const Index ref = report.permutation[i];
    const double angle = sad(M_ref.data().col(ref), M_est.data().col(static_cast<Index>(i)));
    report.sad_per_endmember[static_cast<std::size_t>(ref)] = angle;
    sum += angle * angle;
  }
  report.rms_sad = std::sqrt(sum / static_cast<double>(report.permutation.size()));

  if (S_ref != nullptr && S_est != nullptr) {
    const std::vector<double> angles = per_pixel_aad(*S_ref, *S_est, report.permutation);
    AngleSummary summary;
    double squares = 0.0;
    for (double a : angles) {
      summary.mean += a;
      summary.max = std::max(summary.max, a);
      squares += a * a;
    }
    summary.mean /= static_cast<double>(angles.size());
    report.aad_per_pixel_summary = summary;
    report.rms_aad = std::sqrt(squares / static_cast<double>(angles.size()));
  }
  return report;
}

}  // namespace mlunmix
