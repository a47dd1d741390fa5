// Drives the built mlunmix binary end to end.
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mlunmix/io.hpp"
#include "mlunmix/metrics.hpp"
#include "mlunmix/synthgen.hpp"
#include "temp_dir.hpp"

using namespace mlunmix;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + MLUNMIX_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return io::read_text(p); }

void write_json(const fs::path& p, const json& j) { io::write_text(p, j.dump(2)); }

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Small scene so each command runs in well under a second.
json small_scene(std::uint64_t seed) {
  return {{"rows", 16}, {"cols", 16}, {"block_size", 4}, {"lowpass_window", 3},
          {"endmember_count", 3}, {"snr_db", 35}, {"seed", seed}};
}

json small_unmix(std::uint64_t seed) { return {{"max_iters", 40}, {"seed", seed}}; }

const std::vector<std::string> kSynthFiles{"X.json", "X.bin", "A_true.csv",
                                           "S_true.json", "S_true.bin", "manifest.json"};

}  // namespace

TEST_CASE("synth writes the scene and reloads bitwise") {
  test::TempDir dir("cli");
  write_json(dir / "spec.json", small_scene(3));
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "scene"), dir / "log") == 0);
  for (const auto& name : kSynthFiles) CHECK_MESSAGE(fs::exists(dir / "scene" / name), name);

  const SpectralLibrary lib = load_library(MLUNMIX_TEST_DATA_DIR "/sample_library.csv");
  SceneSpec spec;
  spec.endmember_names = first_materials(lib, 3);
  spec.rows = spec.cols = 16;
  spec.block_size = 4;
  spec.lowpass_window = 3;
  spec.snr_db = 35;
  spec.seed = 3;
  const Scene scene = generate_scene(lib, spec);

  const auto [header, X] = io::read_cube(dir / "scene" / "X");
  CHECK(X == scene.X.data());
  REQUIRE(header.grid);
  CHECK(header.grid->first == 16);
  CHECK(io::read_cube(dir / "scene" / "S_true").second == scene.S_true.data());
  const auto A = io::read_labelled_csv(dir / "scene" / "A_true.csv");
  CHECK(A.values == scene.A_true.data());
  CHECK(A.names == spec.endmember_names);

  const json manifest = json::parse(slurp(dir / "scene" / "manifest.json"));
  CHECK(manifest["command"] == "synth");
  CHECK(manifest["config"]["seed"] == 3);
}

TEST_CASE("synth rejects an invalid purity threshold") {
  test::TempDir dir("cli");
  json spec = small_scene(1);
  spec["purity_threshold"] = 0;
  write_json(dir / "spec.json", spec);
  CHECK(run("synth " + q(dir / "spec.json") + " " + q(dir / "out"), dir / "log") != 0);
  CHECK(slurp(dir / "log").find("purity_threshold") != std::string::npos);

  write_json(dir / "typo.json", json{{"purity", 0.5}});
  CHECK(run("synth " + q(dir / "typo.json") + " " + q(dir / "out2"), dir / "log2") != 0);
  CHECK(slurp(dir / "log2").find("purity") != std::string::npos);
}

TEST_CASE("synth is byte-reproducible, also from its own manifest") {
  test::TempDir dir("cli");
  write_json(dir / "spec.json", small_scene(9));
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "a"), dir / "log") == 0);
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "b"), dir / "log") == 0);
  REQUIRE(run("synth " + q(dir / "a" / "manifest.json") + " " + q(dir / "c"), dir / "log") == 0);
  for (const auto& name : kSynthFiles) {
    CHECK_MESSAGE(slurp(dir / "a" / name) == slurp(dir / "b" / name), name);
    CHECK_MESSAGE(slurp(dir / "a" / name) == slurp(dir / "c" / name), name);
  }
}

TEST_CASE("unmix: mlnmf with one layer and alpha 0 equals l12nmf") {
  test::TempDir dir("cli");
  write_json(dir / "spec.json", small_scene(4));
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "scene"), dir / "log") == 0);
  json ml = small_unmix(21);
  ml["layer_count"] = 1;
  ml["alpha"] = 0;
  write_json(dir / "ml.json", ml);
  write_json(dir / "l12.json", small_unmix(21));
  const std::string cube = q(dir / "scene" / "X");
  REQUIRE(run("unmix " + cube + " 3 --method mlnmf --config " + q(dir / "ml.json") + " " +
                  q(dir / "ml"),
              dir / "log") == 0);
  REQUIRE(run("unmix " + cube + " 3 --method l12nmf --config " + q(dir / "l12.json") + " " +
                  q(dir / "l12"),
              dir / "log") == 0);
  for (const char* name : {"endmembers.csv", "abundances.json", "abundances.bin",
                           "layer_1.csv", "traces.csv"}) {
    CHECK_MESSAGE(slurp(dir / "ml" / name) == slurp(dir / "l12" / name), name);
  }
  CHECK_FALSE(fs::exists(dir / "l12" / "layer_2.csv"));
}

TEST_CASE("unmix: manifest reruns are byte-identical") {
  test::TempDir dir("cli");
  write_json(dir / "spec.json", small_scene(5));
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "scene"), dir / "log") == 0);
  write_json(dir / "cfg.json", small_unmix(8));
  const std::string cube = q(dir / "scene" / "X");
  REQUIRE(run("unmix " + cube + " 3 --config " + q(dir / "cfg.json") + " " + q(dir / "a"),
              dir / "log") == 0);
  REQUIRE(run("unmix " + cube + " 3 --config " + q(dir / "a" / "manifest.json") + " " +
                  q(dir / "b"),
              dir / "log") == 0);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    CHECK_MESSAGE(slurp(entry.path()) == slurp(dir / "b" / name), name.string());
  }
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["method"] == "mlnmf");
  CHECK(manifest["layers"].size() == 3);
}

TEST_CASE("unmix: vca endmembers are cube columns") {
  test::TempDir dir("cli");
  write_json(dir / "spec.json", small_scene(6));
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "scene"), dir / "log") == 0);
  REQUIRE(run("unmix " + q(dir / "scene" / "X") + " 3 --method vca " + q(dir / "vca"),
              dir / "log") == 0);
  const Matrix X = io::read_cube(dir / "scene" / "X").second;
  const Matrix E = io::read_labelled_csv(dir / "vca" / "endmembers.csv").values;
  const json manifest = json::parse(slurp(dir / "vca" / "manifest.json"));
  const auto idx = manifest["vca"]["pixel_indices"].get<std::vector<Index>>();
  REQUIRE(idx.size() == 3);
  for (Index k = 0; k < 3; ++k) CHECK(E.col(k) == X.col(idx[static_cast<std::size_t>(k)]));
}

TEST_CASE("unmix: errors give a nonzero exit") {
  test::TempDir dir("cli");
  CHECK(run("unmix " + q(dir / "missing") + " 3 " + q(dir / "out"), dir / "log") != 0);
  CHECK(slurp(dir / "log").find("error") != std::string::npos);
}

TEST_CASE("eval: identity, permutation invariance, library equivalence") {
  test::TempDir dir("cli");
  write_json(dir / "spec.json", small_scene(7));
  REQUIRE(run("synth " + q(dir / "spec.json") + " " + q(dir / "scene"), dir / "log") == 0);
  const std::string truth = " --truth " + q(dir / "scene") + " ";

  REQUIRE(run("eval " + q(dir / "scene") + truth + q(dir / "self"), dir / "log") == 0);
  const json self = json::parse(slurp(dir / "self" / "report.json"));
  CHECK(self["rms_sad"].get<double>() < 1e-7);
  CHECK(self["rms_aad"].get<double>() < 1e-7);

  write_json(dir / "cfg.json", small_unmix(2));
  REQUIRE(run("unmix " + q(dir / "scene" / "X") + " 3 --config " + q(dir / "cfg.json") + " " +
                  q(dir / "est"),
              dir / "log") == 0);
  REQUIRE(run("eval " + q(dir / "est") + truth + q(dir / "rep"), dir / "log") == 0);
  const json rep = json::parse(slurp(dir / "rep" / "report.json"));
  CHECK(rep["method"] == "mlnmf");
  CHECK(slurp(dir / "rep" / "report.txt").find("Method") != std::string::npos);

  // Same numbers from the library on the same files.
  const auto ref = io::read_labelled_csv(dir / "scene" / "A_true.csv");
  const Matrix S_ref = io::read_cube(dir / "scene" / "S_true").second;
  const auto est = io::read_labelled_csv(dir / "est" / "endmembers.csv");
  const Matrix S_est = io::read_cube(dir / "est" / "abundances").second;
  const EvalReport lib =
      evaluate(EndmemberMatrix(ref.values), EndmemberMatrix(est.values), &S_ref, &S_est);
  CHECK(rep["rms_sad"].get<double>() == lib.rms_sad);
  CHECK(rep["rms_aad"].get<double>() == *lib.rms_aad);
  CHECK(rep["permutation"].get<std::vector<Index>>() == lib.permutation);

  // Column-permuted estimate: same metrics.
  fs::create_directories(dir / "perm");
  const std::vector<Index> perm{2, 0, 1};
  io::LabelledColumns shuffled = est;
  Matrix S_perm(S_est.rows(), S_est.cols());
  for (Index k = 0; k < 3; ++k) {
    shuffled.values.col(k) = est.values.col(perm[static_cast<std::size_t>(k)]);
    shuffled.names[static_cast<std::size_t>(k)] = est.names[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    S_perm.row(k) = S_est.row(perm[static_cast<std::size_t>(k)]);
  }
  io::write_labelled_csv(dir / "perm" / "endmembers.csv", shuffled);
  io::write_cube(dir / "perm" / "abundances", S_perm);
  REQUIRE(run("eval " + q(dir / "perm") + truth + q(dir / "rep_perm"), dir / "log") == 0);
  const json rp = json::parse(slurp(dir / "rep_perm" / "report.json"));
  CHECK(rp["rms_sad"] == rep["rms_sad"]);
  CHECK(rp["rms_aad"] == rep["rms_aad"]);
  CHECK(rp["sad_per_endmember"] == rep["sad_per_endmember"]);

  // Reference-library mode.
  REQUIRE(run("eval " + q(dir / "est") + " --reference-library " +
                  q(MLUNMIX_TEST_DATA_DIR "/sample_library.csv") + " --materials " +
                  ref.names[0] + "," + ref.names[1] + "," + ref.names[2] + " " + q(dir / "lib"),
              dir / "log") == 0);
  const json lr = json::parse(slurp(dir / "lib" / "report.json"));
  CHECK(lr["rms_sad"].get<double>() == lib.rms_sad);
  CHECK_FALSE(lr.contains("rms_aad"));
}

TEST_CASE("sweep: row count and byte-identical reruns") {
  test::TempDir dir("cli");
  json scene = small_scene(0);
  scene.erase("seed");
  scene.erase("snr_db");
  write_json(dir / "scene.json", scene);
  write_json(dir / "cfg.json", json{{"max_iters", 10}});
  const std::string common = "sweep " + q(dir / "scene.json") + " --config " +
                             q(dir / "cfg.json") +
                             " --snr 15,25,35,45 --methods vca,l12nmf,mlnmf --repeats 5 ";
  REQUIRE(run(common + "--no-timing --out " + q(dir / "a"), dir / "log") == 0);
  REQUIRE(run(common + "--no-timing --out " + q(dir / "b"), dir / "log") == 0);
  const std::string csv = slurp(dir / "a" / "sweep.csv");
  CHECK(csv == slurp(dir / "b" / "sweep.csv"));

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "snr_db,method,repeat,rms_sad,rms_aad,seconds,error");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 60);

  // The manifest alone reproduces the run.
  REQUIRE(run("sweep " + q(dir / "a" / "manifest.json") + " --out " + q(dir / "c"),
              dir / "log") == 0);
  CHECK(slurp(dir / "c" / "sweep.csv") == csv);
}
