#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string cli_bin() {
  const char* env = std::getenv("MSPEC_CLI_BIN");
  return env ? env : "";
}

int run(const std::string& args) {
  const std::string cmd = cli_bin() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args) {
  const std::string out = "/tmp/mspec_cli_out.txt";
  const std::string cmd = cli_bin() + " " + args + " > " + out + " 2>&1";
  std::system(cmd.c_str());
  std::ifstream is(out);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

#define REQUIRE_CLI()                                        \
  do {                                                        \
    if (cli_bin().empty()) {                                  \
      MESSAGE("MSPEC_CLI_BIN not set; skipping cli test");    \
      return;                                                 \
    }                                                         \
  } while (0)

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen/learn/eval pipeline with exit codes") {
  REQUIRE_CLI();
  TempDir dir("mspec_cli_pipe");
  CHECK(run("gen --d 4 --k 1 --n 60000 --seed 1 --out " + dir.str()) == 0);
  CHECK(fs::exists(dir.path / "model.json"));
  CHECK(fs::exists(dir.path / "samples.bin"));
  CHECK(fs::exists(dir.path / "manifest.json"));

  CHECK(run("learn --samples " + dir.str() + "/samples.bin --k 1 --epsilon 0.2 --out " +
            dir.str()) == 0);
  CHECK(fs::exists(dir.path / "hypothesis.bin"));

  // assertion pass and fail paths
  CHECK(run("eval --model " + dir.str() + "/model.json --hypothesis " + dir.str() +
            "/hypothesis.bin --n 40000 --seed 9 --assert-epsilon 0.2") == 0);
  CHECK(run("eval --model " + dir.str() + "/model.json --hypothesis " + dir.str() +
            "/hypothesis.bin --n 40000 --seed 9 --assert-epsilon 0.0001") == 1);
}

TEST_CASE("usage errors exit 2") {
  REQUIRE_CLI();
  CHECK(run("gen --d 4 --n 100 --out /tmp/mspec_cli_x") == 2);  // missing --k
  CHECK(run("bogus-subcommand") == 2);
  CHECK(run("verify --suite unknown-suite") == 2);
}

TEST_CASE("runtime errors exit 1") {
  REQUIRE_CLI();
  TempDir dir("mspec_cli_err");
  // corrupt samples header
  std::ofstream bad(dir.path / "samples.bin", std::ios::binary);
  bad << "notaheader";
  bad.close();
  CHECK(run("learn --samples " + dir.str() + "/samples.bin --k 1 --out " + dir.str()) == 1);
  // model/hypothesis dim mismatch
  TempDir a("mspec_cli_a"), b("mspec_cli_b");
  CHECK(run("gen --d 4 --k 1 --n 4000 --seed 1 --out " + a.str()) == 0);
  CHECK(run("gen --d 5 --k 1 --n 4000 --seed 1 --out " + b.str()) == 0);
  CHECK(run("learn --samples " + a.str() + "/samples.bin --k 1 --out " + a.str()) == 0);
  CHECK(run("eval --model " + b.str() + "/model.json --hypothesis " + a.str() +
            "/hypothesis.bin --n 1000") == 1);
}

TEST_CASE("gen profile properties reach the CLI surface") {
  REQUIRE_CLI();
  TempDir dir("mspec_cli_prof");
  CHECK(run("gen --d 6 --k 3 --n 10 --seed 2 --profile cancelling --out " + dir.str()) == 0);
  const std::string model = slurp(dir.str() + "/model.json");
  CHECK(model.find("\"width\": 3") != std::string::npos);
  CHECK(run("gen --d 6 --k 1 --n 10 --seed 2 --profile cancelling --out " + dir.str()) == 1);
  CHECK(run("gen --d 6 --k 1 --n 10 --seed 2 --profile sideways --out " + dir.str()) == 1);
}

TEST_CASE("schur eval prints the frozen value") {
  REQUIRE_CLI();
  const std::string out = run_capture("schur eval --lambda 2,1 --x 2,3");
  CHECK(out.find("30") != std::string::npos);
}

TEST_CASE("schur verify targeted suites") {
  REQUIRE_CLI();
  CHECK(run("schur verify --suite scalar --k 2 --t 4 --trials 200 --seed 3") == 0);
  CHECK(run("schur verify --suite recursion --k 2 --t 4 --dim 2 --trials 20 --seed 3") == 0);
  CHECK(run("schur verify --suite even --k 2 --t 6 --dim 3 --trials 200 --seed 3") == 0);
}

TEST_CASE("determinism: same seed and config give bitwise-identical outputs at "
          "1 and 8 threads") {
  REQUIRE_CLI();
  // data outputs must agree across thread counts; full trees (manifests
  // included) must agree for repeated identical commands
  TempDir d1("mspec_cli_det1"), d2("mspec_cli_det2"), d3("mspec_cli_det3");
  const std::string gen_args = "--d 4 --k 2 --n 30000 --seed 5 --out ";
  CHECK(run("gen --threads 1 " + gen_args + d1.str()) == 0);
  CHECK(run("gen --threads 8 " + gen_args + d2.str()) == 0);
  CHECK(slurp(d1.str() + "/samples.bin") == slurp(d2.str() + "/samples.bin"));
  CHECK(slurp(d1.str() + "/model.json") == slurp(d2.str() + "/model.json"));

  // repeat the exact command into the same directory: every file identical
  const std::string m1 = slurp(d1.str() + "/manifest.json");
  CHECK(run("gen --threads 1 " + gen_args + d1.str()) == 0);
  CHECK(slurp(d1.str() + "/manifest.json") == m1);
  CHECK(run("gen --threads 1 " + gen_args + d3.str()) == 0);
  CHECK(slurp(d1.str() + "/samples.bin") == slurp(d3.str() + "/samples.bin"));

  const std::string learn_args =
      " --k 2 --epsilon 0.3 --seed 5 --out ";
  CHECK(run("learn --threads 1 --samples " + d1.str() + "/samples.bin" + learn_args +
            d1.str()) == 0);
  CHECK(run("learn --threads 8 --samples " + d2.str() + "/samples.bin" + learn_args +
            d2.str()) == 0);
  CHECK(slurp(d1.str() + "/hypothesis.bin") == slurp(d2.str() + "/hypothesis.bin"));

  CHECK(run("eval --threads 1 --model " + d1.str() + "/model.json --hypothesis " +
            d1.str() + "/hypothesis.bin --n 20000 --seed 3 --analytic --out " + d1.str()) == 0);
  CHECK(run("eval --threads 8 --model " + d2.str() + "/model.json --hypothesis " +
            d2.str() + "/hypothesis.bin --n 20000 --seed 3 --analytic --out " + d2.str()) == 0);
  CHECK(slurp(d1.str() + "/report.json") == slurp(d2.str() + "/report.json"));
}

TEST_CASE("manifest round-trip: echoed config reproduces the run") {
  REQUIRE_CLI();
  TempDir dir("mspec_cli_mani");
  CHECK(run("gen --d 4 --k 2 --n 20000 --seed 8 --out " + dir.str()) == 0);
  CHECK(run("learn --samples " + dir.str() + "/samples.bin --k 2 --epsilon 0.25 "
            "--degree-D 10 --out " + dir.str()) == 0);
  const std::string hyp1 = slurp(dir.str() + "/hypothesis.bin");

  // extract the echoed config into a file and re-run with it
  std::ifstream mis(dir.str() + "/manifest.json");
  std::stringstream mss;
  mss << mis.rdbuf();
  const std::string manifest = mss.str();
  const auto cfg_pos = manifest.find("\"config\": {");
  REQUIRE(cfg_pos != std::string::npos);
  int depth = 0;
  std::size_t start = manifest.find('{', cfg_pos), end = start;
  for (std::size_t i = start; i < manifest.size(); ++i) {
    if (manifest[i] == '{') ++depth;
    if (manifest[i] == '}' && --depth == 0) {
      end = i;
      break;
    }
  }
  std::ofstream cfg(dir.str() + "/config.json");
  cfg << manifest.substr(start, end - start + 1);
  cfg.close();

  TempDir rerun("mspec_cli_mani2");
  CHECK(run("learn --samples " + dir.str() + "/samples.bin --k 2 --config " +
            dir.str() + "/config.json --out " + rerun.str()) == 0);
  CHECK(slurp(rerun.str() + "/hypothesis.bin") == hyp1);
}

TEST_CASE("experiment subcommand is reproducible") {
  REQUIRE_CLI();
  TempDir d1("mspec_cli_exp1"), d2("mspec_cli_exp2");
  const std::string args =
      "experiment --d 4 --k 1 --epsilon 0.25 --seed 4 --instance-seed 4 "
      "--n-subspace 30000 --n-regression 30000 --n-eval 20000 --out ";
  CHECK(run(args + d1.str() + " --threads 1") == 0);
  CHECK(run(args + d2.str() + " --threads 8") == 0);
  CHECK(slurp(d1.str() + "/report.json") == slurp(d2.str() + "/report.json"));
  CHECK(slurp(d1.str() + "/hypothesis.bin") == slurp(d2.str() + "/hypothesis.bin"));
  CHECK(slurp(d1.str() + "/model.json") == slurp(d2.str() + "/model.json"));
}

}  // TEST_SUITE
