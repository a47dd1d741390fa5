#include "mlunmix/mlnmf.hpp"

#include <random>

#include "mlunmix/vca.hpp"

namespace mlunmix {

namespace {

// Sub-seed salts; fixed so every stream is reproducible from layer_fit.seed.
constexpr std::uint64_t kInitSalt = 1;
constexpr std::uint64_t kLayerSalt = 100;

NmfInit random_init(const Matrix& X, Index P, std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double peak = X.maxCoeff() > 0.0 ? X.maxCoeff() : 1.0;
  Matrix A0(X.rows(), P);
  for (Index j = 0; j < P; ++j) {
    for (Index i = 0; i < X.rows(); ++i) A0(i, j) = peak * unit(rng);
  }
  Matrix S0(P, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    for (Index i = 0; i < P; ++i) S0(i, j) = unit(rng);
    S0.col(j) /= S0.col(j).sum();
  }
  return NmfInit{A0.cwiseMax(eps), S0.cwiseMax(eps)};
}

Matrix near_identity(Index P, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, amplitude);
  Matrix A = Matrix::Identity(P, P);
  for (Index j = 0; j < P; ++j) {
    for (Index i = 0; i < P; ++i) A(i, j) += unit(rng);
  }
  return A;
}

}  // namespace

std::string to_string(InitMode mode) { return mode == InitMode::vca ? "vca" : "random"; }

InitMode parse_init_mode(const std::string& text) {
  if (text == "vca") return InitMode::vca;
  if (text == "random") return InitMode::random;
  throw std::invalid_argument("init_mode must be 'vca' or 'random', got '" + text + "'");
}

void MlnmfConfig::validate() const {
  if (layer_count < 1) throw std::invalid_argument("layer_count must be >= 1");
  if (alpha && !(*alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (lambda && !(*lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(layer_init_noise >= 0.0)) throw std::invalid_argument("layer_init_noise must be >= 0");
  layer_fit.validate();
  fcls.validate();
}

SparsityWeights MlnmfConfig::resolve_weights(const Matrix& X) const {
  SparsityWeights w;
  w.lambda = lambda ? *lambda : estimate_lambda(X);
  w.alpha = alpha ? *alpha : 0.1 * w.lambda;
  w.validate();
  return w;
}

MlnmfConfig single_layer_config(MlnmfConfig cfg) {
  cfg.layer_count = 1;
  cfg.alpha = 0.0;
  return cfg;
}

EndmemberMatrix collapse_layers(const std::vector<Matrix>& layer_factors) {
  if (layer_factors.empty()) {
    throw std::invalid_argument("collapse_layers: no layer factors");
  }
  Matrix product = layer_factors.front();
  for (std::size_t l = 1; l < layer_factors.size(); ++l) {
    const Matrix& next = layer_factors[l];
    if (next.rows() != product.cols()) {
      throw std::invalid_argument("collapse_layers: factor " + std::to_string(l) + " is " +
                                  shape_string(next) + " but the running product is " +
                                  shape_string(product));
    }
    product = product * next;
  }
  return EndmemberMatrix(std::move(product));
}

UnmixResult unmix(const ObservationMatrix& X, Index P, const MlnmfConfig& cfg) {
  cfg.validate();
  if (P < 1 || P > std::min(X.band_count(), X.pixel_count())) {
    throw std::invalid_argument("unmix: P = " + std::to_string(P) +
                                " must lie in [1, min(L, N)] for X " + shape_string(X.data()));
  }
  const SparsityWeights weights = cfg.resolve_weights(X.data());
  const double eps = cfg.layer_fit.epsilon_floor;
  const std::uint64_t seed = cfg.layer_fit.seed;

  NmfInit init = cfg.init_mode == InitMode::vca
                     ? init_from_vca(X, P, mix_seed(seed, kInitSalt), eps, cfg.fcls)
                     : random_init(X.data(), P, mix_seed(seed, kInitSalt), eps);

  std::vector<Matrix> factors;
  std::vector<CostTrace> traces;
  Matrix target = X.data();
  Matrix A0 = std::move(init.A0);
  Matrix S0 = std::move(init.S0);
  for (int layer = 1; layer <= cfg.layer_count; ++layer) {
    if (layer > 1) {
      A0 = near_identity(P, cfg.layer_init_noise,
                         mix_seed(seed, kLayerSalt + static_cast<std::uint64_t>(layer)));
      S0 = target.cwiseMax(eps);
    }
    try {
      LayerFit fit = fit_layer(target, A0, S0, weights, cfg.layer_fit);
      factors.push_back(std::move(fit.A));
      traces.push_back(std::move(fit.trace));
      target = std::move(fit.S);
    } catch (const NonFiniteCostError& e) {
      throw LayerError(layer, e.iteration(),
                       "layer " + std::to_string(layer) + ": " + e.what());
    }
  }

  EndmemberMatrix endmembers = collapse_layers(factors);
  AbundanceMatrix abundances = cfg.final_fcls
                                   ? fcls_image(endmembers, X, cfg.fcls)
                                   : AbundanceMatrix(std::move(target));
  return UnmixResult{std::move(endmembers), std::move(abundances), std::move(factors),
                     std::move(traces), weights};
}

}  // namespace mlunmix
