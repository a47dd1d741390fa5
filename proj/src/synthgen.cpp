#include "mlunmix/synthgen.hpp"

#include <random>
#include <set>
#include <stdexcept>

#include "mlunmix/io.hpp"

namespace mlunmix {

Index SpectralLibrary::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return static_cast<Index>(k);
  }
  throw std::out_of_range("material '" + name + "' is not in the library");
}

SpectralLibrary load_library(const std::filesystem::path& path) {
  io::LabelledColumns table = io::read_labelled_csv(path);
  return SpectralLibrary{std::move(table.names), std::move(table.wavelengths),
                         std::move(table.values)};
}

void save_library(const std::filesystem::path& path, const SpectralLibrary& lib) {
  io::write_labelled_csv(path, io::LabelledColumns{lib.names, lib.wavelengths, lib.spectra});
}

void SceneSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("scene grid must be at least 1x1");
  if (block_size < 1) throw std::invalid_argument("block_size must be >= 1");
  if (rows % block_size != 0 || cols % block_size != 0) {
    throw std::invalid_argument("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " is not divisible into " + std::to_string(block_size) + "x" +
                                std::to_string(block_size) + " blocks");
  }
  if (lowpass_window < 1 || lowpass_window % 2 == 0) {
    throw std::invalid_argument("lowpass_window must be a positive odd integer");
  }
  if (!(purity_threshold > 0.0 && purity_threshold <= 1.0)) {
    throw std::invalid_argument("purity_threshold must lie in (0, 1], got " +
                                std::to_string(purity_threshold));
  }
  if (std::isnan(snr_db)) throw std::invalid_argument("snr_db must not be NaN");
  std::set<std::string> unique(endmember_names.begin(), endmember_names.end());
  if (unique.size() != endmember_names.size()) {
    throw std::invalid_argument("endmember_names contains duplicates");
  }
}

std::vector<std::string> first_materials(const SpectralLibrary& lib, Index count) {
  if (count < 1 || count > lib.material_count()) {
    throw std::invalid_argument("requested " + std::to_string(count) + " materials from a library of " +
                                std::to_string(lib.material_count()));
  }
  return {lib.names.begin(), lib.names.begin() + count};
}

Matrix generate_abundances(const SceneSpec& spec, Index P) {
  spec.validate();
  if (P < 1) throw std::invalid_argument("generate_abundances: P must be >= 1");
  const Index rows = spec.rows;
  const Index cols = spec.cols;
  const Index z = spec.block_size;
  auto pixel = [cols](Index r, Index c) { return r * cols + c; };

  std::mt19937_64 rng(mix_seed(spec.seed, 1));
  std::uniform_int_distribution<Index> pick(0, P - 1);
  Matrix one_hot = Matrix::Zero(P, rows * cols);
  for (Index br = 0; br < rows / z; ++br) {
    for (Index bc = 0; bc < cols / z; ++bc) {
      const Index material = pick(rng);
      for (Index r = br * z; r < (br + 1) * z; ++r) {
        for (Index c = bc * z; c < (bc + 1) * z; ++c) one_hot(material, pixel(r, c)) = 1.0;
      }
    }
  }

  // Mean filter; the window is truncated at the grid border.
  const Index half = spec.lowpass_window / 2;
  Matrix S(P, rows * cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      Vector acc = Vector::Zero(P);
      Index count = 0;
      for (Index rr = std::max<Index>(0, r - half); rr <= std::min(rows - 1, r + half); ++rr) {
        for (Index cc = std::max<Index>(0, c - half); cc <= std::min(cols - 1, c + half); ++cc) {
          acc += one_hot.col(pixel(rr, cc));
          ++count;
        }
      }
      S.col(pixel(r, c)) = acc / static_cast<double>(count);
    }
  }

  const double uniform = 1.0 / static_cast<double>(P);
  for (Index j = 0; j < S.cols(); ++j) {
    if (S.col(j).maxCoeff() > spec.purity_threshold) S.col(j).setConstant(uniform);
    S.col(j) /= S.col(j).sum();
  }
  return S;
}

Scene generate_scene(const SpectralLibrary& lib, const SceneSpec& spec) {
  spec.validate();
  if (spec.endmember_names.empty()) {
    throw std::invalid_argument("scene spec names no endmembers");
  }
  const Index P = static_cast<Index>(spec.endmember_names.size());
  if (P > lib.material_count()) {
    throw std::invalid_argument("scene asks for " + std::to_string(P) +
                                " endmembers, library has " + std::to_string(lib.material_count()));
  }
  Matrix A(lib.band_count(), P);
  for (Index i = 0; i < P; ++i) {
    A.col(i) = lib.spectra.col(lib.index_of(spec.endmember_names[static_cast<std::size_t>(i)]));
  }
  EndmemberMatrix A_true(std::move(A), spec.endmember_names);
  AbundanceMatrix S_true(generate_abundances(spec, P), true);
  ObservationMatrix clean = mix(A_true, S_true);
  ObservationMatrix X = add_noise(clean, NoiseSpec{spec.snr_db, mix_seed(spec.seed, 2)});
  Matrix clean_data = clean.data();
  return Scene{std::move(X), std::move(A_true), std::move(S_true), std::move(clean_data)};
}

}  // namespace mlunmix
