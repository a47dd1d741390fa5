#ifndef MLUNMIX_VCA_HPP
#define MLUNMIX_VCA_HPP

#include <cstdint>
#include <vector>

#include "mlunmix/fcls.hpp"
#include "mlunmix/model.hpp"

namespace mlunmix {

struct VcaResult {
  EndmemberMatrix endmembers;
  std::vector<Index> pixel_indices;
  /// Dimension of the subspace the extreme-pixel search ran in.
  Index projection_rank = 0;
  /// SNR estimate that selected the projection (dB, may be +inf).
  double estimated_snr_db = 0.0;
};

/// Vertex component analysis. Endmembers are columns of X; ties in the
/// extreme-pixel search go to the lowest column index.
VcaResult vca(const ObservationMatrix& X, Index P, std::uint64_t seed);

struct NmfInit {
  Matrix A0;
  Matrix S0;
};

/// VCA endmembers and their FCLS abundances, floored at epsilon.
NmfInit init_from_vca(const ObservationMatrix& X, Index P, std::uint64_t seed,
                      double epsilon_floor = 1e-9, const FclsConfig& fcls = {});

}  // namespace mlunmix

#endif  // MLUNMIX_VCA_HPP
