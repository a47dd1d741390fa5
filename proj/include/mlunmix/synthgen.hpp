#ifndef MLUNMIX_SYNTHGEN_HPP
#define MLUNMIX_SYNTHGEN_HPP

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mlunmix/model.hpp"

namespace mlunmix {

struct SpectralLibrary {
  std::vector<std::string> names;
  std::optional<Vector> wavelengths;
  /// L bands x K materials.
  Matrix spectra;

  Index band_count() const { return spectra.rows(); }
  Index material_count() const { return spectra.cols(); }
  /// Column of the named material; throws std::out_of_range if absent.
  Index index_of(const std::string& name) const;
};

/// Library CSV: header of material names (optional leading `wavelength`
/// column), then one row per band.
SpectralLibrary load_library(const std::filesystem::path& path);
void save_library(const std::filesystem::path& path, const SpectralLibrary& lib);

struct SceneSpec {
  std::vector<std::string> endmember_names;
  Index rows = 64;
  Index cols = 64;
  Index block_size = 8;
  /// Side of the square mean filter; 1 disables smoothing.
  Index lowpass_window = 9;
  double purity_threshold = 0.8;
  /// +inf disables noise.
  double snr_db = 30.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The first `count` library materials, used when a spec names none.
std::vector<std::string> first_materials(const SpectralLibrary& lib, Index count);

struct Scene {
  ObservationMatrix X;
  EndmemberMatrix A_true;
  AbundanceMatrix S_true;
  /// Noiseless A_true * S_true, kept for SNR checks.
  Matrix clean;
};

/// Block-structured abundance field, mean-filtered, with pixels purer
/// than the threshold replaced by the uniform mixture. Pixels are ordered
/// row-major over the grid.
Matrix generate_abundances(const SceneSpec& spec, Index P);

Scene generate_scene(const SpectralLibrary& lib, const SceneSpec& spec);

}  // namespace mlunmix

#endif  // MLUNMIX_SYNTHGEN_HPP
