#ifndef MLUNMIX_COMMANDS_HPP
#define MLUNMIX_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlunmix/metrics.hpp"
#include "mlunmix/mlnmf.hpp"
#include "mlunmix/synthgen.hpp"
#include "mlunmix/vca.hpp"

namespace mlunmix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string toolkit_version();

/// Path of the fixture library shipped with the sources.
fs::path bundled_library_path();

enum class Method { mlnmf, l12nmf, vca };
std::string to_string(Method method);
Method parse_method(const std::string& text);

// ---- configuration files -------------------------------------------------
//
// Every configuration file is a JSON object. A manifest written by any
// command is accepted in its place: its "config" member is used.

/// Returns the "config" member of a manifest, or the object itself.
json load_config_object(const fs::path& path);

struct SceneConfig {
  /// Resolved relative to the spec file; defaults to the bundled library.
  fs::path library;
  /// Used when spec.endmember_names is empty: the first N library materials.
  Index endmember_count = 6;
  SceneSpec spec;
};

SceneConfig scene_config_from_json(const json& j, const fs::path& base_dir);
json to_json(const SceneConfig& cfg);

MlnmfConfig mlnmf_config_from_json(const json& j);
json to_json(const MlnmfConfig& cfg);

/// Library and names resolved; spec.endmember_names filled in.
struct ResolvedScene {
  SpectralLibrary library;
  SceneConfig config;
};
ResolvedScene resolve_scene(SceneConfig cfg);

// ---- solver dispatch -----------------------------------------------------

struct MethodOutput {
  EndmemberMatrix endmembers;
  AbundanceMatrix abundances;
  std::optional<UnmixResult> nmf;
  std::optional<VcaResult> vca;
  /// Configuration with data-dependent weights filled in.
  MlnmfConfig resolved;
};

/// l12nmf runs the cascade with one layer and alpha = 0; vca attaches FCLS
/// abundances to the VCA endmembers.
MethodOutput run_method(const ObservationMatrix& X, Index P, Method method,
                        const MlnmfConfig& cfg);

/// Entries below the epsilon floor become exactly zero.
Matrix export_abundances(const Matrix& S, double floor = 1e-9);

// ---- commands ------------------------------------------------------------

/// Writes X.{json,bin}, A_true.csv, S_true.{json,bin}, manifest.json.
void cmd_synth(const fs::path& spec_file, const fs::path& out_dir);

struct UnmixOptions {
  fs::path cube;
  Index endmember_count = 0;
  std::optional<fs::path> config_file;
  std::optional<Method> method;
  fs::path out_dir;
};

/// Writes endmembers.csv, abundances.{json,bin}, layer_<l>.csv,
/// traces.csv and manifest.json.
void cmd_unmix(const UnmixOptions& options);

struct EvalOptions {
  fs::path estimate_dir;
  std::optional<fs::path> truth_dir;
  std::optional<fs::path> reference_library;
  /// Library columns to compare against; all columns when empty.
  std::vector<std::string> materials;
  fs::path out_dir;
};

/// Writes report.json and report.txt; returns the report.
EvalReport cmd_eval(const EvalOptions& options);

struct SweepOptions {
  std::optional<fs::path> spec_file;
  std::optional<fs::path> config_file;
  std::vector<double> snr_db;
  std::vector<Method> methods;
  int repeats = 0;
  std::optional<std::uint64_t> master_seed;
  bool record_timing = true;
  fs::path out_dir;
};

struct SweepRow {
  double snr_db = 0.0;
  Method method = Method::mlnmf;
  int repeat = 0;
  double rms_sad = 0.0;
  double rms_aad = 0.0;
  double seconds = 0.0;
  std::string error;
};

struct SweepPlan {
  SceneConfig scene;
  MlnmfConfig unmix;
  std::vector<double> snr_db;
  std::vector<Method> methods;
  int repeats = 1;
  std::uint64_t master_seed = 0;
  bool record_timing = true;
};

/// Seed of the scene shared by every method at (snr, repeat).
std::uint64_t scene_seed(std::uint64_t master, double snr_db, int repeat);
/// Solver seed at (snr, repeat), also shared across methods so that the NMF
/// variants start from the same initialization.
std::uint64_t solver_seed(std::uint64_t master, double snr_db, int repeat);

/// Rows ordered by ascending SNR, then method as listed, then repeat.
std::vector<SweepRow> run_sweep(const SweepPlan& plan);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes sweep.csv and manifest.json; returns the rows.
std::vector<SweepRow> cmd_sweep(const SweepOptions& options);

/// True when MLUNMIX_VERBOSE is set to a non-empty value other than 0.
bool verbose();

}  // namespace mlunmix::cli

#endif  // MLUNMIX_COMMANDS_HPP
