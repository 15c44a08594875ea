// moment-spectra: generate / learn / eval / verify workflows over the
// moment-tensor learning library.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mspec/config_json.hpp"
#include "mspec/rng.hpp"
#include "mspec/datagen.hpp"
#include "mspec/error.hpp"
#include "mspec/evalharness.hpp"
#include "mspec/learner.hpp"
#include "mspec/schur.hpp"
#include "mspec/threading.hpp"
#include "mspec/verify_suites.hpp"

using nlohmann::json;

namespace {

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw mspec::Error(mspec::ErrorKind::InvalidArgument,
                                      "expected a comma-separated list, got '" + s + "'");
  return out;
}

std::vector<int> parse_csv_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_csv_doubles(s)) out.push_back(static_cast<int>(v));
  return out;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw mspec::Error(mspec::ErrorKind::Io, "cannot write " + path);
  os << j.dump(2) << "\n";
  if (!os) throw mspec::Error(mspec::ErrorKind::Io, "short write to " + path);
}

json load_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw mspec::Error(mspec::ErrorKind::Io, "cannot read " + path);
  try {
    json j;
    is >> j;
    return j;
  } catch (const json::exception& e) {
    throw mspec::Error(mspec::ErrorKind::Parse, path + ": " + e.what());
  }
}

struct GenArgs {
  std::size_t d = 4, k = 1, n = 10000;
  std::uint64_t seed = 0;
  std::string out;
  std::string profile = "generic";
  double theta = 0.01;
  double noise_sigma = 0.0;
  int threads = 0;
  bool timing = false;
};

int cmd_gen(const GenArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const mspec::WeightProfile profile = mspec::parse_profile(a.profile);
  const mspec::ReluNetwork net = mspec::random_network(a.d, a.k, profile, a.seed, a.theta);
  const mspec::SampleSet samples =
      mspec::sample(net, a.n, a.seed, mspec::rng_stream::kSubspace, a.noise_sigma,
                    mspec::resolve_threads(a.threads));
  std::filesystem::create_directories(a.out);
  mspec::write_model_file(a.out + "/model.json", net);
  mspec::write_samples_file(a.out + "/samples.bin", samples);
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["command"] = "gen";
  manifest["config"] = {{"d", a.d},          {"k", a.k},
                        {"n", a.n},          {"seed", a.seed},
                        {"profile", a.profile}, {"theta", a.theta},
                        {"noise_sigma", a.noise_sigma}};
  manifest["outputs"] = {{"model", a.out + "/model.json"},
                         {"samples", a.out + "/samples.bin"}};
  if (a.timing) manifest["runtime_seconds"] = dt;
  write_json_file(a.out + "/manifest.json", manifest);
  std::printf("gen: wrote %zu samples (d=%zu, k=%zu, profile=%s) to %s in %.2fs\n",
              a.n, a.d, a.k, a.profile.c_str(), a.out.c_str(), dt);
  return 0;
}

struct LearnArgs {
  std::string samples;
  std::string config_file;
  std::string out = ".";
  mspec::LearnConfig config;
  bool k_set = false, n_sub_set = false, n_reg_set = false;
  int threads = 0;
  bool timing = false;
};

int cmd_learn(LearnArgs& a, const std::vector<std::string>& flag_order) {
  const auto t0 = std::chrono::steady_clock::now();
  mspec::LearnConfig c;
  if (!a.config_file.empty()) mspec::learn_config_from_json(load_json_file(a.config_file), c);
  // flags override file values
  for (const std::string& f : flag_order) {
    if (f == "k") c.k = a.config.k;
    else if (f == "epsilon") c.epsilon = a.config.epsilon;
    else if (f == "degree-D") c.degree_D = a.config.degree_D;
    else if (f == "moment-cutoff") c.moment_cutoff = a.config.moment_cutoff;
    else if (f == "seed") c.seed = a.config.seed;
    else if (f == "n-subspace") { c.n_subspace = a.config.n_subspace; a.n_sub_set = true; }
    else if (f == "n-regression") { c.n_regression = a.config.n_regression; a.n_reg_set = true; }
    else if (f == "sample-multiplier") c.sample_multiplier = a.config.sample_multiplier;
    else if (f == "c-degree") c.c_degree = a.config.c_degree;
  }
  c.threads = mspec::resolve_threads(a.threads);

  const mspec::SampleSet all = mspec::read_samples_file(a.samples);
  c.d = all.dim;
  // fresh-sample split between the subspace and regression stages
  const std::size_t half = all.n / 2;
  if (half == 0)
    throw mspec::Error(mspec::ErrorKind::InvalidArgument,
                       "need at least 2 samples to split between stages");
  mspec::SampleSet sub, reg;
  sub.n = half;
  sub.dim = all.dim;
  sub.x.assign(all.x.begin(), all.x.begin() + half * all.dim);
  sub.y.assign(all.y.begin(), all.y.begin() + half);
  reg.n = all.n - half;
  reg.dim = all.dim;
  reg.x.assign(all.x.begin() + half * all.dim, all.x.end());
  reg.y.assign(all.y.begin() + half, all.y.end());
  if (!a.n_sub_set && a.config_file.empty()) c.n_subspace = sub.n;
  if (!a.n_reg_set && a.config_file.empty()) c.n_regression = reg.n;

  const mspec::LearnResult result =
      mspec::learn(mspec::make_source(sub), mspec::make_source(reg), c);
  std::filesystem::create_directories(a.out);
  mspec::write_hypothesis_file(a.out + "/hypothesis.bin", result.hypothesis);
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["command"] = "learn";
  manifest["config"] = mspec::learn_config_to_json(c);
  manifest["inputs"] = {{"samples", a.samples}};
  manifest["outputs"] = {{"hypothesis", a.out + "/hypothesis.bin"}};
  manifest["eigenvalues"] = result.eigenvalues;
  manifest["moment_cutoff"] = result.moment_cutoff;
  manifest["degree"] = result.hypothesis.degree;
  manifest["degree_capped"] = result.degree_capped;
  manifest["sample_counts"] = {{"subspace", result.n_subspace_used},
                               {"regression", result.n_regression_used}};
  manifest["warnings"] = result.warnings;
  if (a.timing) manifest["runtime_seconds"] = dt;
  write_json_file(a.out + "/manifest.json", manifest);

  std::printf("learn: degree %zu, cutoff %zu, top eigenvalue %.4g; wrote %s in %.2fs\n",
              result.hypothesis.degree, result.moment_cutoff,
              result.eigenvalues.empty() ? 0.0 : result.eigenvalues.front(),
              (a.out + "/hypothesis.bin").c_str(), dt);
  for (const auto& w : result.warnings) std::printf("learn: warning: %s\n", w.c_str());
  return 0;
}

struct EvalArgs {
  std::string model, hypothesis, out;
  std::size_t n = 100000;
  std::uint64_t seed = 12345;
  double assert_epsilon = -1.0;
  bool analytic = false;
  int threads = 0;
  bool timing = false;
};

int cmd_eval(const EvalArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const mspec::ReluNetwork net = mspec::read_model_file(a.model);
  const mspec::Hypothesis h = mspec::read_hypothesis_file(a.hypothesis);
  mspec::EvalReport report;
  report.mc = mspec::l2_error_mc(net, h, a.n, a.seed, mspec::resolve_threads(a.threads));
  if (a.analytic) report.analytic = mspec::l2_error_analytic(net, h);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::printf("eval: l2_error_mc = %.6g (se %.2g, n=%zu)\n", report.mc.error,
              report.mc.se, a.n);
  if (report.analytic)
    std::printf("eval: l2_error_analytic = %.6g (tail beyond D: %.3g)\n",
                report.analytic->total,
                report.analytic->tail_exact + report.analytic->tail_bound);
  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    write_json_file(a.out + "/report.json", report.to_json(a.timing));
    json manifest;
    manifest["command"] = "eval";
    manifest["config"] = {{"model", a.model},
                          {"hypothesis", a.hypothesis},
                          {"n", a.n},
                          {"seed", a.seed},
                          {"analytic", a.analytic},
                          {"assert_epsilon", a.assert_epsilon}};
    if (a.timing) manifest["runtime_seconds"] = report.runtime_seconds;
    write_json_file(a.out + "/manifest.json", manifest);
  }
  if (a.assert_epsilon >= 0 && report.mc.error > a.assert_epsilon) {
    std::printf("eval: FAIL, error %.6g exceeds epsilon %.6g\n", report.mc.error,
                a.assert_epsilon);
    return 1;
  }
  if (a.assert_epsilon >= 0)
    std::printf("eval: PASS, error %.6g <= epsilon %.6g\n", report.mc.error,
                a.assert_epsilon);
  return 0;
}

int print_suites(const std::vector<mspec::SuiteOutcome>& outcomes) {
  bool all_pass = true;
  for (const auto& o : outcomes) {
    std::printf("[%s] %s\n", o.pass ? "PASS" : "FAIL", o.name.c_str());
    for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 0;
  std::size_t k = 2, t = 4, dim = 2, trials = 1000;
};

int cmd_verify(const VerifyArgs& a) {
  using namespace mspec;
  if (a.suite == "all") return print_suites(run_all_suites(a.seed));
  if (a.suite == "hermite") return print_suites({suite_hermite(a.seed)});
  if (a.suite == "coeff") return print_suites({suite_relu_coefficients()});
  if (a.suite == "schur") return print_suites({suite_schur(a.seed)});
  if (a.suite == "bounds") return print_suites({suite_moment_bounds(a.seed)});
  VerifyReport rep;
  if (a.suite == "recursion")
    rep = verify_tensor_recursion(a.k, a.t, a.dim, a.trials, a.seed);
  else if (a.suite == "scalar")
    rep = verify_scalar_bound(a.k, a.t, a.trials, a.seed);
  else if (a.suite == "even")
    rep = verify_even_bound(a.k, a.t, a.dim, a.trials, a.seed);
  else
    throw CLI::ValidationError("--suite",
                               "unknown suite '" + a.suite +
                                   "' (expected all|hermite|coeff|schur|bounds|"
                                   "recursion|scalar|even)");
  std::printf("[%s] %s: trials=%zu violations=%zu worst_ratio=%.3g %s\n",
              rep.pass ? "PASS" : "FAIL", rep.suite.c_str(), rep.trials,
              rep.violations, rep.worst_ratio, rep.detail.c_str());
  return rep.pass ? 0 : 1;
}

struct ExperimentArgs {
  mspec::LearnConfig config;
  std::string out;
  std::string profile = "generic";
  double theta = 0.01;
  std::uint64_t instance_seed = 0;
  std::size_t n_eval = 100000;
  bool analytic = false;
  double assert_epsilon = -1.0;
  int threads = 0;
  bool timing = false;
};

int cmd_experiment(ExperimentArgs& a) {
  a.config.threads = mspec::resolve_threads(a.threads);
  mspec::InstanceSpec inst;
  inst.d = a.config.d;
  inst.k = a.config.k;
  inst.profile = mspec::parse_profile(a.profile);
  inst.theta = a.theta;
  inst.seed = a.instance_seed;
  const mspec::ExperimentResult res = mspec::run_experiment(
      a.config, inst, a.out, a.n_eval, a.analytic, a.timing);
  std::printf("experiment: l2_error_mc = %.6g (se %.2g), subspace angle %.3g rad, %.2fs\n",
              res.report.mc.error, res.report.mc.se,
              res.manifest["subspace_angle"].get<double>(),
              res.report.runtime_seconds);
  if (a.assert_epsilon >= 0 && res.report.mc.error > a.assert_epsilon) {
    std::printf("experiment: FAIL, error exceeds %.6g\n", a.assert_epsilon);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment-tensor learning of one-hidden-layer ReLU networks"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "generate a ground-truth model and samples");
  cgen->add_option("--d", gen.d, "ambient dimension");
  cgen->add_option("--k", gen.k, "network width")->required();
  cgen->add_option("--n", gen.n, "number of samples");
  cgen->add_option("--seed", gen.seed, "rng seed");
  cgen->add_option("--out", gen.out, "output directory")->required();
  cgen->add_option("--profile", gen.profile, "generic|near-parallel|cancelling");
  cgen->add_option("--theta", gen.theta, "near-parallel angle bound");
  cgen->add_option("--noise-sigma", gen.noise_sigma, "label noise sigma");
  cgen->add_option("--threads", gen.threads, "worker threads (0: env or 1)");
  cgen->add_flag("--timing", gen.timing, "include wall time in manifest");

  LearnArgs learn;
  auto* clearn = app.add_subcommand("learn", "learn a hypothesis from a samples file");
  clearn->add_option("--samples", learn.samples, "samples.bin path")->required();
  clearn->add_option("--k", learn.config.k, "network width bound")->required();
  clearn->add_option("--epsilon", learn.config.epsilon, "target L2 error");
  clearn->add_option("--config", learn.config_file, "JSON config file");
  clearn->add_option("--out", learn.out, "output directory");
  clearn->add_option("--degree-D", learn.config.degree_D, "regression degree override");
  clearn->add_option("--moment-cutoff", learn.config.moment_cutoff, "moment cutoff override");
  clearn->add_option("--seed", learn.config.seed, "seed echoed into the manifest");
  clearn->add_option("--n-subspace", learn.config.n_subspace, "subspace-stage samples");
  clearn->add_option("--n-regression", learn.config.n_regression, "regression-stage samples");
  clearn->add_option("--sample-multiplier", learn.config.sample_multiplier,
                     "scales both sample counts");
  clearn->add_option("--c-degree", learn.config.c_degree, "degree rule constant");
  clearn->add_option("--threads", learn.threads, "worker threads (0: env or 1)");
  clearn->add_flag("--timing", learn.timing, "include wall time in manifest");

  EvalArgs eval;
  auto* ceval = app.add_subcommand("eval", "Monte Carlo / analytic error of a hypothesis");
  ceval->add_option("--model", eval.model, "model.json path")->required();
  ceval->add_option("--hypothesis", eval.hypothesis, "hypothesis.bin path")->required();
  ceval->add_option("--n", eval.n, "evaluation points");
  ceval->add_option("--seed", eval.seed, "evaluation seed");
  ceval->add_option("--assert-epsilon", eval.assert_epsilon,
                    "exit 1 unless error <= epsilon");
  ceval->add_flag("--analytic", eval.analytic, "add the closed-form decomposition");
  ceval->add_option("--out", eval.out, "directory for report.json");
  ceval->add_option("--threads", eval.threads, "worker threads (0: env or 1)");
  ceval->add_flag("--timing", eval.timing, "include wall time in report");

  VerifyArgs verify;
  auto* cverify = app.add_subcommand("verify", "run property suites");
  cverify->add_option("--suite", verify.suite,
                      "all|hermite|coeff|schur|bounds|recursion|scalar|even");
  cverify->add_option("--seed", verify.seed, "rng seed");
  cverify->add_option("--k", verify.k, "targeted run: k");
  cverify->add_option("--t", verify.t, "targeted run: t");
  cverify->add_option("--dim", verify.dim, "targeted run: dim");
  cverify->add_option("--trials", verify.trials, "targeted run: trials");

  auto* cschur = app.add_subcommand("schur", "Schur polynomial utilities");
  cschur->require_subcommand(1);
  std::string lambda_csv, x_csv;
  auto* cschur_eval = cschur->add_subcommand("eval", "evaluate s_lambda(x)");
  cschur_eval->add_option("--lambda", lambda_csv, "partition, e.g. 2,1")->required();
  cschur_eval->add_option("--x", x_csv, "evaluation point, e.g. 2,3")->required();
  VerifyArgs schur_verify;
  auto* cschur_verify = cschur->add_subcommand("verify", "bound/recursion suites");
  cschur_verify->add_option("--suite", schur_verify.suite, "scalar|recursion|even")
      ->required();
  cschur_verify->add_option("--k", schur_verify.k, "k");
  cschur_verify->add_option("--t", schur_verify.t, "t");
  cschur_verify->add_option("--dim", schur_verify.dim, "dim");
  cschur_verify->add_option("--trials", schur_verify.trials, "trials");
  cschur_verify->add_option("--seed", schur_verify.seed, "seed");

  ExperimentArgs exp;
  auto* cexp = app.add_subcommand("experiment",
                                  "generate, learn and evaluate in one reproducible run");
  cexp->add_option("--d", exp.config.d, "ambient dimension")->required();
  cexp->add_option("--k", exp.config.k, "network width")->required();
  cexp->add_option("--epsilon", exp.config.epsilon, "target L2 error");
  cexp->add_option("--profile", exp.profile, "instance profile");
  cexp->add_option("--theta", exp.theta, "near-parallel angle bound");
  cexp->add_option("--seed", exp.config.seed, "sampling seed");
  cexp->add_option("--instance-seed", exp.instance_seed, "instance seed");
  cexp->add_option("--n-subspace", exp.config.n_subspace, "subspace-stage samples");
  cexp->add_option("--n-regression", exp.config.n_regression, "regression-stage samples");
  cexp->add_option("--degree-D", exp.config.degree_D, "regression degree override");
  cexp->add_option("--moment-cutoff", exp.config.moment_cutoff, "moment cutoff override");
  cexp->add_option("--n-eval", exp.n_eval, "evaluation points");
  cexp->add_option("--noise-sigma", exp.config.noise_sigma, "label noise sigma");
  cexp->add_flag("--analytic", exp.analytic, "add analytic decomposition");
  cexp->add_option("--assert-epsilon", exp.assert_epsilon, "exit 1 unless error <= epsilon");
  cexp->add_option("--out", exp.out, "output directory");
  cexp->add_option("--threads", exp.threads, "worker threads (0: env or 1)");
  cexp->add_flag("--timing", exp.timing, "include wall time in outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return 2;
  }

  try {
    if (*cgen) return cmd_gen(gen);
    if (*clearn) {
      std::vector<std::string> set_flags;
      for (const char* name : {"k", "epsilon", "degree-D", "moment-cutoff", "seed",
                               "n-subspace", "n-regression", "sample-multiplier",
                               "c-degree"})
        if (clearn->count(std::string("--") + name)) set_flags.push_back(name);
      return cmd_learn(learn, set_flags);
    }
    if (*ceval) return cmd_eval(eval);
    if (*cverify) return cmd_verify(verify);
    if (*cschur_eval) {
      const mspec::Partition lambda(parse_csv_ints(lambda_csv));
      const std::vector<double> x = parse_csv_doubles(x_csv);
      std::printf("%.17g\n", mspec::schur_bialternant(lambda, x));
      return 0;
    }
    if (*cschur_verify) return cmd_verify(schur_verify);
    if (*cexp) return cmd_experiment(exp);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mspec::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", mspec::to_string(e.kind()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
