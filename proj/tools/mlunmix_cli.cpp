// mlunmix: synthetic scenes, unmixing, evaluation and SNR sweeps.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlunmix/commands.hpp"

namespace cli = mlunmix::cli;

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral unmixing with multilayer L1/2-sparse NMF"};
  app.set_version_flag("--version", cli::toolkit_version());
  app.require_subcommand(1);

  std::string spec_file;
  std::string out_dir;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  synth->add_option("spec", spec_file, "Scene spec JSON (or a synth manifest)")->required();
  synth->add_option("out_dir", out_dir, "Output directory")->required();

  cli::UnmixOptions unmix_opts;
  std::string cube, config_file, method;
  long endmembers = 0;
  auto* unmix = app.add_subcommand("unmix", "Unmix a cube");
  unmix->add_option("cube", cube, "Cube stem (reads <stem>.json and <stem>.bin)")->required();
  unmix->add_option("endmembers", endmembers, "Number of endmembers P")->required()->check(CLI::PositiveNumber);
  unmix->add_option("--config", config_file, "Unmix config JSON (or an unmix manifest)");
  unmix->add_option("--method", method, "mlnmf, l12nmf or vca")
      ->check(CLI::IsMember({"mlnmf", "l12nmf", "vca"}));
  unmix->add_option("out_dir", out_dir, "Output directory")->required();

  cli::EvalOptions eval_opts;
  std::string est_dir, truth_dir, library;
  auto* eval = app.add_subcommand("eval", "Compare estimates against a reference");
  eval->add_option("estimate_dir", est_dir, "Directory written by unmix (or synth)")->required();
  auto* truth_opt = eval->add_option("--truth", truth_dir, "Directory written by synth");
  auto* lib_opt = eval->add_option("--reference-library", library, "Reference library CSV");
  truth_opt->excludes(lib_opt);
  eval->add_option("--materials", eval_opts.materials, "Library columns to compare against")
      ->delimiter(',');
  eval->add_option("out_dir", out_dir, "Output directory")->required();

  cli::SweepOptions sweep_opts;
  std::string sweep_spec, sweep_config;
  std::vector<std::string> sweep_methods;
  std::uint64_t master_seed = 0;
  bool no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Run an SNR sweep over methods");
  sweep->add_option("spec", sweep_spec, "Scene spec JSON (or a sweep manifest)");
  sweep->add_option("--config", sweep_config, "Unmix config JSON");
  sweep->add_option("--snr", sweep_opts.snr_db, "SNR values in dB")->delimiter(',');
  sweep->add_option("--methods", sweep_methods, "Methods to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"mlnmf", "l12nmf", "vca"}));
  sweep->add_option("--repeats", sweep_opts.repeats, "Scenes per SNR")->check(CLI::PositiveNumber);
  auto* seed_opt = sweep->add_option("--master-seed", master_seed, "Master seed");
  sweep->add_flag("--no-timing", no_timing, "Write 0 in the seconds column");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      cli::cmd_synth(spec_file, out_dir);
    } else if (*unmix) {
      unmix_opts.cube = cube;
      unmix_opts.endmember_count = endmembers;
      if (!config_file.empty()) unmix_opts.config_file = config_file;
      if (!method.empty()) unmix_opts.method = cli::parse_method(method);
      unmix_opts.out_dir = out_dir;
      cli::cmd_unmix(unmix_opts);
    } else if (*eval) {
      eval_opts.estimate_dir = est_dir;
      if (*truth_opt) eval_opts.truth_dir = truth_dir;
      if (*lib_opt) eval_opts.reference_library = library;
      eval_opts.out_dir = out_dir;
      const auto report = cli::cmd_eval(eval_opts);
      std::cout << "rms_sad = " << report.rms_sad << '\n';
      if (report.rms_aad) std::cout << "rms_aad = " << *report.rms_aad << '\n';
    } else if (*sweep) {
      if (!sweep_spec.empty()) sweep_opts.spec_file = sweep_spec;
      if (!sweep_config.empty()) sweep_opts.config_file = sweep_config;
      for (const auto& m : sweep_methods) sweep_opts.methods.push_back(cli::parse_method(m));
      if (*seed_opt) sweep_opts.master_seed = master_seed;
      sweep_opts.record_timing = !no_timing;
      sweep_opts.out_dir = out_dir;
      const auto rows = cli::cmd_sweep(sweep_opts);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
      if (failed > 0) {
        std::cerr << "sweep: " << failed << " of " << rows.size() << " runs failed\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
