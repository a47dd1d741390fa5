#include "mlunmix/commands.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>

#include "mlunmix/io.hpp"

#ifndef MLUNMIX_VERSION
#define MLUNMIX_VERSION "0.0.0"
#endif
#ifndef MLUNMIX_DATA_DIR
#define MLUNMIX_DATA_DIR "data"
#endif

namespace mlunmix::cli {

std::string toolkit_version() { return MLUNMIX_VERSION; }

fs::path bundled_library_path() { return fs::path(MLUNMIX_DATA_DIR) / "sample_library.csv"; }

std::string to_string(Method method) {
  switch (method) {
    case Method::mlnmf: return "mlnmf";
    case Method::l12nmf: return "l12nmf";
    case Method::vca: return "vca";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "mlnmf") return Method::mlnmf;
  if (text == "l12nmf") return Method::l12nmf;
  if (text == "vca") return Method::vca;
  throw std::invalid_argument("unknown method '" + text + "' (expected mlnmf, l12nmf or vca)");
}

bool verbose() {
  const char* value = std::getenv("MLUNMIX_VERBOSE");
  return value != nullptr && *value != '\0' && std::string(value) != "0";
}

namespace {

json load_json(const fs::path& path) {
  const std::string text = io::read_text(path);
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw io::FormatError(path.string() + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw io::FormatError(path.string() + ": " + e.what());
  }
}

// Reads members of a JSON object and rejects keys nobody asked for.
class Fields {
public:
  Fields(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw std::invalid_argument(context_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    try {
      target = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(context_ + ": field '" + key + "': " + e.what());
    }
  }

  template <typename T>
  void read_optional(const char* key, std::optional<T>& target) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T value{};
    read(key, value);
    target = value;
  }

  void read_snr(const char* key, double& target) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    const json& v = j_.at(key);
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s != "inf") throw std::invalid_argument(context_ + ": field '" + key + "' must be a number or \"inf\"");
      target = std::numeric_limits<double>::infinity();
    } else {
      read(key, target);
    }
  }

  void skip(const char* key) { seen_.insert(key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw std::invalid_argument(context_ + ": unknown field '" + item.key() + "'");
      }
    }
  }

private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

json snr_to_json(double snr) {
  if (std::isinf(snr) && snr > 0) return "inf";
  return snr;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json file_digest(const fs::path& path) {
  return {{"path", path.generic_string()}, {"sha256", io::sha256_file(path)}};
}

std::vector<std::string> numbered_names(const std::string& prefix, Index count) {
  std::vector<std::string> names;
  for (Index i = 1; i <= count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

void write_manifest(const fs::path& out_dir, json manifest, const std::vector<std::string>& outputs) {
  json digests = json::object();
  for (const auto& name : outputs) digests[name] = io::sha256_file(out_dir / name);
  manifest["outputs"] = digests;
  io::write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

json base_manifest(const std::string& command) {
  return {{"tool", "mlunmix"}, {"version", toolkit_version()}, {"command", command}};
}

}  // namespace

json load_config_object(const fs::path& path) {
  json j = load_json(path);
  if (j.contains("config") && j.contains("tool")) return j.at("config");
  return j;
}

SceneConfig scene_config_from_json(const json& j, const fs::path& base_dir) {
  SceneConfig cfg;
  Fields f(j, "scene spec");
  std::optional<std::string> library;
  f.read_optional("library", library);
  if (library) {
    fs::path p(*library);
    cfg.library = p.is_absolute() ? p : base_dir / p;
  } else {
    cfg.library = bundled_library_path();
  }
  f.read("endmembers", cfg.spec.endmember_names);
  f.read("endmember_count", cfg.endmember_count);
  f.read("rows", cfg.spec.rows);
  f.read("cols", cfg.spec.cols);
  f.read("block_size", cfg.spec.block_size);
  f.read("lowpass_window", cfg.spec.lowpass_window);
  f.read("purity_threshold", cfg.spec.purity_threshold);
  f.read_snr("snr_db", cfg.spec.snr_db);
  f.read("seed", cfg.spec.seed);
  f.finish();
  if (cfg.endmember_count < 1) throw std::invalid_argument("scene spec: endmember_count must be >= 1");
  cfg.spec.validate();
  return cfg;
}

json to_json(const SceneConfig& cfg) {
  return {{"library", cfg.library.generic_string()},
          {"endmembers", cfg.spec.endmember_names},
          {"endmember_count", cfg.endmember_count},
          {"rows", cfg.spec.rows},
          {"cols", cfg.spec.cols},
          {"block_size", cfg.spec.block_size},
          {"lowpass_window", cfg.spec.lowpass_window},
          {"purity_threshold", cfg.spec.purity_threshold},
          {"snr_db", snr_to_json(cfg.spec.snr_db)},
          {"seed", cfg.spec.seed}};
}

MlnmfConfig mlnmf_config_from_json(const json& j) {
  MlnmfConfig cfg;
  Fields f(j, "unmix config");
  f.read("layer_count", cfg.layer_count);
  f.read_optional("alpha", cfg.alpha);
  f.read_optional("lambda", cfg.lambda);
  f.read("max_iters", cfg.layer_fit.max_iters);
  f.read("rel_tol", cfg.layer_fit.rel_tol);
  f.read("epsilon_floor", cfg.layer_fit.epsilon_floor);
  f.read("asc_augment", cfg.layer_fit.asc_augment);
  f.read("asc_delta", cfg.layer_fit.asc_delta);
  f.read("seed", cfg.layer_fit.seed);
  std::string init = to_string(cfg.init_mode);
  f.read("init_mode", init);
  cfg.init_mode = parse_init_mode(init);
  f.read("final_fcls", cfg.final_fcls);
  f.read_optional("fcls_delta", cfg.fcls.delta);
  f.read("fcls_max_iters", cfg.fcls.max_active_set_iters);
  f.read("fcls_tol", cfg.fcls.tol);
  f.read("fcls_renormalize_below", cfg.fcls.renormalize_below);
  f.read("layer_init_noise", cfg.layer_init_noise);
  f.finish();
  cfg.validate();
  return cfg;
}

json to_json(const MlnmfConfig& cfg) {
  return {{"layer_count", cfg.layer_count},
          {"alpha", nullable(cfg.alpha)},
          {"lambda", nullable(cfg.lambda)},
          {"max_iters", cfg.layer_fit.max_iters},
          {"rel_tol", cfg.layer_fit.rel_tol},
          {"epsilon_floor", cfg.layer_fit.epsilon_floor},
          {"asc_augment", cfg.layer_fit.asc_augment},
          {"asc_delta", cfg.layer_fit.asc_delta},
          {"seed", cfg.layer_fit.seed},
          {"init_mode", to_string(cfg.init_mode)},
          {"final_fcls", cfg.final_fcls},
          {"fcls_delta", nullable(cfg.fcls.delta)},
          {"fcls_max_iters", cfg.fcls.max_active_set_iters},
          {"fcls_tol", cfg.fcls.tol},
          {"fcls_renormalize_below", cfg.fcls.renormalize_below},
          {"layer_init_noise", cfg.layer_init_noise}};
}

ResolvedScene resolve_scene(SceneConfig cfg) {
  SpectralLibrary lib = load_library(cfg.library);
  if (cfg.spec.endmember_names.empty()) {
    cfg.spec.endmember_names = first_materials(lib, cfg.endmember_count);
  }
  cfg.endmember_count = static_cast<Index>(cfg.spec.endmember_names.size());
  return ResolvedScene{std::move(lib), std::move(cfg)};
}

MethodOutput run_method(const ObservationMatrix& X, Index P, Method method,
                        const MlnmfConfig& cfg) {
  if (method == Method::vca) {
    VcaResult found = vca(X, P, cfg.layer_fit.seed);
    AbundanceMatrix S = fcls_image(found.endmembers, X, cfg.fcls);
    EndmemberMatrix A = found.endmembers;
    return MethodOutput{std::move(A), std::move(S), std::nullopt, std::move(found), cfg};
  }
  MlnmfConfig resolved = method == Method::l12nmf ? single_layer_config(cfg) : cfg;
  const SparsityWeights w = resolved.resolve_weights(X.data());
  resolved.alpha = w.alpha;
  resolved.lambda = w.lambda;
  UnmixResult result = unmix(X, P, resolved);
  EndmemberMatrix A = result.endmembers;
  AbundanceMatrix S = result.abundances;
  return MethodOutput{std::move(A), std::move(S), std::move(result), std::nullopt, resolved};
}

Matrix export_abundances(const Matrix& S, double floor) {
  return S.unaryExpr([floor](double v) { return v < floor ? 0.0 : v; });
}

void cmd_synth(const fs::path& spec_file, const fs::path& out_dir) {
  SceneConfig parsed;
  try {
    parsed = scene_config_from_json(load_config_object(spec_file), spec_file.parent_path());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(spec_file.string() + ": " + e.what());
  }
  ResolvedScene resolved = resolve_scene(std::move(parsed));
  const Scene scene = generate_scene(resolved.library, resolved.config.spec);

  fs::create_directories(out_dir);
  const auto grid = std::make_pair(resolved.config.spec.rows, resolved.config.spec.cols);
  io::write_cube(out_dir / "X", scene.X.data(), grid);
  io::write_labelled_csv(out_dir / "A_true.csv",
                         io::LabelledColumns{scene.A_true.names(), resolved.library.wavelengths,
                                             scene.A_true.data()});
  io::write_cube(out_dir / "S_true", scene.S_true.data(), grid);

  json manifest = base_manifest("synth");
  manifest["config"] = to_json(resolved.config);
  manifest["inputs"] = {{"library", file_digest(resolved.config.library)}};
  write_manifest(out_dir, manifest,
                 {"X.json", "X.bin", "A_true.csv", "S_true.json", "S_true.bin"});
}

void cmd_unmix(const UnmixOptions& options) {
  MlnmfConfig cfg;
  std::optional<Method> method = options.method;
  if (options.config_file) {
    const json file = load_json(*options.config_file);
    const bool is_manifest = file.contains("tool") && file.contains("config");
    try {
      cfg = mlnmf_config_from_json(is_manifest ? file.at("config") : file);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(options.config_file->string() + ": " + e.what());
    }
    if (!method && is_manifest && file.contains("method")) {
      method = parse_method(file.at("method").get<std::string>());
    }
  }
  const Method chosen = method.value_or(Method::mlnmf);

  auto [header, data] = io::read_cube(options.cube);
  const ObservationMatrix X(std::move(data));
  const Index P = options.endmember_count;

  const MethodOutput out = run_method(X, P, chosen, cfg);

  fs::create_directories(options.out_dir);
  std::vector<std::string> written;
  io::write_labelled_csv(options.out_dir / "endmembers.csv",
                         io::LabelledColumns{numbered_names("endmember_", P), std::nullopt,
                                             out.endmembers.data()});
  written.push_back("endmembers.csv");
  io::write_cube(options.out_dir / "abundances", export_abundances(out.abundances.data()),
                 header.grid);
  written.push_back("abundances.json");
  written.push_back("abundances.bin");

  json manifest = base_manifest("unmix");
  manifest["method"] = to_string(chosen);
  manifest["endmember_count"] = P;
  manifest["config"] = to_json(out.resolved);
  manifest["inputs"] = {{"cube_header", file_digest(io::cube_header_path(options.cube))},
                        {"cube_payload", file_digest(io::cube_payload_path(options.cube))}};
  manifest["asc_enforced"] = out.abundances.asc_enforced();

  if (out.nmf) {
    std::ostringstream traces;
    traces << "layer,iteration,cost\n";
    json layers = json::array();
    for (std::size_t l = 0; l < out.nmf->layer_factors.size(); ++l) {
      const Matrix& factor = out.nmf->layer_factors[l];
      const std::string name = "layer_" + std::to_string(l + 1) + ".csv";
      io::write_labelled_csv(options.out_dir / name,
                             io::LabelledColumns{numbered_names("c", factor.cols()), std::nullopt,
                                                 factor});
      written.push_back(name);
      const CostTrace& trace = out.nmf->traces[l];
      for (std::size_t k = 0; k < trace.values.size(); ++k) {
        traces << (l + 1) << ',' << k << ',' << io::format_double(trace.values[k]) << '\n';
      }
      layers.push_back({{"iterations", trace.values.size() - 1},
                        {"converged_at", trace.converged_at ? json(*trace.converged_at) : json(nullptr)}});
    }
    io::write_text(options.out_dir / "traces.csv", traces.str());
    written.push_back("traces.csv");
    manifest["layers"] = layers;
  }
  if (out.vca) {
    manifest["vca"] = {{"pixel_indices", out.vca->pixel_indices},
                       {"projection_rank", out.vca->projection_rank}};
  }
  write_manifest(options.out_dir, manifest, written);
}

namespace {

struct LoadedFactors {
  EndmemberMatrix endmembers;
  std::optional<Matrix> abundances;
  std::string label;
};

LoadedFactors load_factors(const fs::path& dir) {
  const bool estimate = fs::exists(dir / "endmembers.csv");
  const fs::path csv = dir / (estimate ? "endmembers.csv" : "A_true.csv");
  const fs::path cube = dir / (estimate ? "abundances" : "S_true");
  io::LabelledColumns table = io::read_labelled_csv(csv);
  LoadedFactors loaded{EndmemberMatrix(std::move(table.values), std::move(table.names)),
                       std::nullopt, estimate ? "estimate" : "truth"};
  if (fs::exists(io::cube_header_path(cube))) loaded.abundances = io::read_cube(cube).second;
  if (fs::exists(dir / "manifest.json")) {
    const json manifest = load_json(dir / "manifest.json");
    if (manifest.contains("method")) loaded.label = manifest.at("method").get<std::string>();
  }
  return loaded;
}

}  // namespace

EvalReport cmd_eval(const EvalOptions& options) {
  if (options.truth_dir.has_value() == options.reference_library.has_value()) {
    throw std::invalid_argument("eval: give exactly one of a truth directory or a reference library");
  }
  const LoadedFactors est = load_factors(options.estimate_dir);

  std::optional<EndmemberMatrix> reference;
  std::optional<Matrix> reference_abundances;
  if (options.truth_dir) {
    LoadedFactors truth = load_factors(*options.truth_dir);
    reference = std::move(truth.endmembers);
    reference_abundances = std::move(truth.abundances);
  } else {
    const SpectralLibrary lib = load_library(*options.reference_library);
    const std::vector<std::string> names = options.materials.empty() ? lib.names : options.materials;
    Matrix M(lib.band_count(), static_cast<Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
      M.col(static_cast<Index>(k)) = lib.spectra.col(lib.index_of(names[k]));
    }
    reference.emplace(std::move(M), names);
  }

  const bool with_abundances = est.abundances && reference_abundances;
  const EvalReport report =
      evaluate(*reference, est.endmembers, with_abundances ? &*reference_abundances : nullptr,
               with_abundances ? &*est.abundances : nullptr);

  std::vector<std::string> ref_names = reference->names();
  if (ref_names.empty()) ref_names = numbered_names("endmember_", reference->endmember_count());

  json sad = json::object();
  for (std::size_t k = 0; k < ref_names.size(); ++k) sad[ref_names[k]] = report.sad_per_endmember[k];
  json j = {{"method", est.label},
            {"reference_names", ref_names},
            {"permutation", report.permutation},
            {"sad_per_endmember", sad},
            {"rms_sad", report.rms_sad}};
  std::ostringstream text;
  text << "method = " << est.label << '\n';
  text << "rms_sad = " << io::format_double(report.rms_sad) << '\n';
  if (report.rms_aad) {
    j["rms_aad"] = *report.rms_aad;
    j["aad_mean"] = report.aad_per_pixel_summary->mean;
    j["aad_max"] = report.aad_per_pixel_summary->max;
    text << "rms_aad = " << io::format_double(*report.rms_aad) << '\n';
    text << "aad_mean = " << io::format_double(report.aad_per_pixel_summary->mean) << '\n';
    text << "aad_max = " << io::format_double(report.aad_per_pixel_summary->max) << '\n';
  }
  text << "permutation =";
  for (Index p : report.permutation) text << ' ' << p;
  text << '\n';
  for (std::size_t k = 0; k < ref_names.size(); ++k) {
    text << "sad." << ref_names[k] << " = " << io::format_double(report.sad_per_endmember[k]) << '\n';
  }
  // Table layout: method -> rmsSAD.
  char row[128];
  std::snprintf(row, sizeof row, "\n%-10s | %s\n%-10s | %.4f\n", "Method", "rmsSAD",
                est.label.c_str(), report.rms_sad);
  text << row;

  fs::create_directories(options.out_dir);
  io::write_text(options.out_dir / "report.json", j.dump(2) + "\n");
  io::write_text(options.out_dir / "report.txt", text.str());
  return report;
}

std::uint64_t scene_seed(std::uint64_t master, double snr_db, int repeat) {
  std::uint64_t s = mix_seed(master, std::bit_cast<std::uint64_t>(snr_db));
  return mix_seed(s, static_cast<std::uint64_t>(repeat));
}

std::uint64_t solver_seed(std::uint64_t master, double snr_db, int repeat) {
  return mix_seed(scene_seed(master, snr_db, repeat), 1000);
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
  if (plan.snr_db.empty()) throw std::invalid_argument("sweep: SNR list is empty");
  if (plan.methods.empty()) throw std::invalid_argument("sweep: no methods");
  if (plan.repeats < 1) throw std::invalid_argument("sweep: repeats must be >= 1");

  std::vector<double> snrs = plan.snr_db;
  std::sort(snrs.begin(), snrs.end());
  ResolvedScene resolved = resolve_scene(plan.scene);
  const Index P = resolved.config.endmember_count;

  std::vector<SweepRow> rows;
  for (double snr : snrs) {
    for (int repeat = 0; repeat < plan.repeats; ++repeat) {
      SceneSpec spec = resolved.config.spec;
      spec.snr_db = snr;
      spec.seed = scene_seed(plan.master_seed, snr, repeat);
      std::optional<Scene> scene;
      std::string scene_error;
      try {
        scene = generate_scene(resolved.library, spec);
      } catch (const std::exception& e) {
        scene_error = std::string("scene: ") + e.what();
      }
      for (Method method : plan.methods) {
        SweepRow row{snr, method, repeat, std::nan(""), std::nan(""), 0.0, scene_error};
        if (scene) {
          MlnmfConfig cfg = plan.unmix;
          cfg.layer_fit.seed = solver_seed(plan.master_seed, snr, repeat);
          const auto start = std::chrono::steady_clock::now();
          try {
            const MethodOutput out = run_method(scene->X, P, method, cfg);
            const auto stop = std::chrono::steady_clock::now();
            const Matrix S = export_abundances(out.abundances.data());
            const EvalReport report =
                evaluate(scene->A_true, out.endmembers, &scene->S_true.data(), &S);
            row.rms_sad = report.rms_sad;
            row.rms_aad = *report.rms_aad;
            if (plan.record_timing) {
              row.seconds = std::chrono::duration<double>(stop - start).count();
            }
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
        if (verbose()) {
          std::cerr << "sweep snr=" << snr << " method=" << to_string(method)
                    << " repeat=" << repeat << " rms_sad=" << row.rms_sad
                    << (row.error.empty() ? "" : " error=" + row.error) << '\n';
        }
        rows.push_back(std::move(row));
      }
    }
  }
  // Generated per (snr, repeat); reorder to snr, method, repeat.
  std::stable_sort(rows.begin(), rows.end(), [&](const SweepRow& a, const SweepRow& b) {
    if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
    auto rank = [&](Method m) {
      return std::find(plan.methods.begin(), plan.methods.end(), m) - plan.methods.begin();
    };
    if (a.method != b.method) return rank(a.method) < rank(b.method);
    return a.repeat < b.repeat;
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "snr_db,method,repeat,rms_sad,rms_aad,seconds,error\n";
  auto number = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
  for (const SweepRow& r : rows) {
    out << number(r.snr_db) << ',' << to_string(r.method) << ',' << r.repeat << ','
        << number(r.rms_sad) << ',' << number(r.rms_aad) << ',' << number(r.seconds) << ','
        << io::csv_field(r.error) << '\n';
  }
  return out.str();
}

std::vector<SweepRow> cmd_sweep(const SweepOptions& options) {
  SweepPlan plan;
  plan.scene.library = bundled_library_path();
  plan.snr_db = {15.0, 25.0, 35.0, 45.0};
  plan.methods = {Method::vca, Method::l12nmf, Method::mlnmf};
  plan.repeats = 5;

  if (options.spec_file) {
    const json j = load_config_object(*options.spec_file);
    const fs::path base = options.spec_file->parent_path();
    try {
      if (j.contains("scene")) {
        // A sweep manifest: the whole plan.
        Fields f(j, "sweep config");
        f.skip("scene");
        f.skip("unmix");
        f.skip("methods");
        f.read("snr_db", plan.snr_db);
        f.read("repeats", plan.repeats);
        f.read("master_seed", plan.master_seed);
        f.read("record_timing", plan.record_timing);
        f.finish();
        plan.scene = scene_config_from_json(j.at("scene"), base);
        if (j.contains("unmix")) plan.unmix = mlnmf_config_from_json(j.at("unmix"));
        if (j.contains("methods")) {
          plan.methods.clear();
          for (const auto& m : j.at("methods")) plan.methods.push_back(parse_method(m.get<std::string>()));
        }
      } else {
        plan.scene = scene_config_from_json(j, base);
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(options.spec_file->string() + ": " + e.what());
    }
  }
  if (options.config_file) {
    try {
      plan.unmix = mlnmf_config_from_json(load_config_object(*options.config_file));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(options.config_file->string() + ": " + e.what());
    }
  }
  if (!options.snr_db.empty()) plan.snr_db = options.snr_db;
  if (!options.methods.empty()) plan.methods = options.methods;
  if (options.repeats > 0) plan.repeats = options.repeats;
  if (options.master_seed) plan.master_seed = *options.master_seed;
  if (!options.record_timing) plan.record_timing = false;

  plan.scene = resolve_scene(plan.scene).config;
  const std::vector<SweepRow> rows = run_sweep(plan);

  fs::create_directories(options.out_dir);
  io::write_text(options.out_dir / "sweep.csv", sweep_csv(rows));

  std::vector<double> sorted_snr = plan.snr_db;
  std::sort(sorted_snr.begin(), sorted_snr.end());
  json methods = json::array();
  for (Method m : plan.methods) methods.push_back(to_string(m));
  json manifest = base_manifest("sweep");
  manifest["config"] = {{"scene", to_json(plan.scene)},
                        {"unmix", to_json(plan.unmix)},
                        {"snr_db", sorted_snr},
                        {"methods", methods},
                        {"repeats", plan.repeats},
                        {"master_seed", plan.master_seed},
                        {"record_timing", plan.record_timing}};
  manifest["inputs"] = {{"library", file_digest(plan.scene.library)}};
  write_manifest(options.out_dir, manifest, {"sweep.csv"});
  return rows;
}

}  // namespace mlunmix::cli
