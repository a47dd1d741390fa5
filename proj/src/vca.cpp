#include "mlunmix/vca.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mlunmix {

namespace {

// Leading `count` eigenvectors of a symmetric matrix, strongest first.
Matrix leading_eigenvectors(const Eigen::SelfAdjointEigenSolver<Matrix>& eig, Index count) {
  const Index n = eig.eigenvectors().cols();
  Matrix U(eig.eigenvectors().rows(), count);
  for (Index k = 0; k < count; ++k) U.col(k) = eig.eigenvectors().col(n - 1 - k);
  return U;
}

Index argmax_lowest(const Vector& v, const std::vector<bool>& excluded) {
  Index best = -1;
  for (Index j = 0; j < v.size(); ++j) {
    if (excluded[static_cast<std::size_t>(j)]) continue;
    if (best < 0 || v(j) > v(best)) best = j;
  }
  return best;
}

}  // namespace

VcaResult vca(const ObservationMatrix& X, Index P, std::uint64_t seed) {
  const Matrix& R = X.data();
  const Index L = R.rows();
  const Index N = R.cols();
  if (P < 1 || P > std::min(L, N)) {
    throw std::invalid_argument("vca: P = " + std::to_string(P) + " must lie in [1, min(L, N)] for X " +
                                shape_string(R));
  }
  const double n = static_cast<double>(N);

  const Eigen::SelfAdjointEigenSolver<Matrix> full_eig((R * R.transpose()) / n);
  const double top = full_eig.eigenvalues().maxCoeff();
  const Index rank = (full_eig.eigenvalues().array() > 1e-12 * top).count();
  if (top <= 0.0 || P > rank) {
    throw std::invalid_argument("vca: P = " + std::to_string(P) + " exceeds data rank " +
                                std::to_string(rank));
  }

  const Vector mean = R.rowwise().mean();
  const Matrix centered = R.colwise() - mean;
  std::vector<bool> excluded(static_cast<std::size_t>(N), false);

  if (P == 1) {
    const Vector norms = centered.colwise().norm().transpose();
    const Index j = argmax_lowest(norms, excluded);
    return VcaResult{EndmemberMatrix(R.col(j)), {j}, 1,
                     std::numeric_limits<double>::quiet_NaN()};
  }

  const Eigen::SelfAdjointEigenSolver<Matrix> centered_eig(
      (centered * centered.transpose()) / n);
  const Matrix Ud = leading_eigenvectors(centered_eig, P);
  const Matrix projected = Ud.transpose() * centered;

  const double power_y = R.squaredNorm() / n;
  const double power_x = projected.squaredNorm() / n + mean.squaredNorm();
  const double signal = power_x - static_cast<double>(P) / static_cast<double>(L) * power_y;
  const double residual = power_y - power_x;
  double snr = std::numeric_limits<double>::infinity();
  if (residual > 0.0) {
    snr = signal > 0.0 ? 10.0 * std::log10(signal / residual)
                       : -std::numeric_limits<double>::infinity();
  }
  const double snr_threshold = 15.0 + 10.0 * std::log10(static_cast<double>(P));

  Matrix y(P, N);
  Index projection_rank = 0;
  if (snr < snr_threshold) {
    // Affine projection to P-1 dims, lifted by a constant coordinate.
    projection_rank = P - 1;
    const Matrix x = projected.topRows(P - 1);
    const double c = x.colwise().norm().maxCoeff();
    y.topRows(P - 1) = x;
    y.bottomRows(1).setConstant(c > 0.0 ? c : 1.0);
  } else {
    // Projective projection onto the P-dim signal subspace.
    projection_rank = P;
    const Matrix x = leading_eigenvectors(full_eig, P).transpose() * R;
    const Vector u = x.rowwise().mean();
    const Eigen::RowVectorXd scale = u.transpose() * x;
    for (Index j = 0; j < N; ++j) y.col(j) = x.col(j) / scale(j);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix basis = Matrix::Zero(P, P);
  basis(P - 1, 0) = 1.0;
  std::vector<Index> indices;
  indices.reserve(static_cast<std::size_t>(P));
  for (Index i = 0; i < P; ++i) {
    Vector w(P);
    for (Index k = 0; k < P; ++k) w(k) = gauss(rng);
    const Matrix pinv = basis.completeOrthogonalDecomposition().pseudoInverse();
    Vector f = w - basis * (pinv * w);
    f.normalize();
    const Vector v = (f.transpose() * y).cwiseAbs().transpose();
    const Index j = argmax_lowest(v, excluded);
    excluded[static_cast<std::size_t>(j)] = true;
    indices.push_back(j);
    basis.col(i) = y.col(j);
  }

  Matrix E(L, P);
  for (Index i = 0; i < P; ++i) E.col(i) = R.col(indices[static_cast<std::size_t>(i)]);
  return VcaResult{EndmemberMatrix(std::move(E)), std::move(indices), projection_rank, snr};
}

NmfInit init_from_vca(const ObservationMatrix& X, Index P, std::uint64_t seed,
                      double epsilon_floor, const FclsConfig& fcls) {
  const VcaResult found = vca(X, P, seed);
  Matrix A0 = found.endmembers.data().cwiseMax(epsilon_floor);
  Matrix S0 = fcls_image(EndmemberMatrix(A0), X, fcls).data().cwiseMax(epsilon_floor);
  return NmfInit{std::move(A0), std::move(S0)};
}

}  // namespace mlunmix
