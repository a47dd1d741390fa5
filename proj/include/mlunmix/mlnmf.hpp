#ifndef MLUNMIX_MLNMF_HPP
#define MLUNMIX_MLNMF_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlunmix/fcls.hpp"
#include "mlunmix/model.hpp"
#include "mlunmix/nmf_core.hpp"

namespace mlunmix {

enum class InitMode { vca, random };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& text);

struct MlnmfConfig {
  int layer_count = 3;
  /// Unset lambda is estimated from the data; unset alpha is 0.1 * lambda.
  std::optional<double> alpha;
  std::optional<double> lambda;
  LayerFitConfig layer_fit;
  InitMode init_mode = InitMode::vca;
  bool final_fcls = true;
  FclsConfig fcls;
  /// Amplitude of the uniform perturbation added to the identity that seeds
  /// layers two and up.
  double layer_init_noise = 0.01;

  void validate() const;
  SparsityWeights resolve_weights(const Matrix& X) const;
};

/// The single-layer L1/2-NMF baseline: one layer, alpha forced to zero.
MlnmfConfig single_layer_config(MlnmfConfig cfg);

struct UnmixResult {
  EndmemberMatrix endmembers;
  AbundanceMatrix abundances;
  std::vector<Matrix> layer_factors;
  std::vector<CostTrace> traces;
  /// Weights actually used (resolved from the data when not configured).
  SparsityWeights weights;
};

/// Fit failure inside the cascade, carrying the 1-based layer index.
class LayerError : public std::runtime_error {
public:
  LayerError(int layer, int iteration, const std::string& what)
      : std::runtime_error(what), layer_(layer), iteration_(iteration) {}
  int layer() const { return layer_; }
  int iteration() const { return iteration_; }

private:
  int layer_;
  int iteration_;
};

/// Left-to-right product A_1 A_2 ... A_n.
EndmemberMatrix collapse_layers(const std::vector<Matrix>& layer_factors);

/// Multilayer sparse NMF: layer 1 fits X ~ A_1 S_1, layer l fits
/// S_{l-1} ~ A_l S_l; the endmembers are the product of the A_l.
/// Layer 1 starts from init_from_vca (or the random init) seeded with
/// mix_seed(layer_fit.seed, 1); layer l >= 2 draws its perturbation from
/// mix_seed(layer_fit.seed, 100 + l).
UnmixResult unmix(const ObservationMatrix& X, Index P, const MlnmfConfig& cfg);

}  // namespace mlunmix

#endif  // MLUNMIX_MLNMF_HPP
