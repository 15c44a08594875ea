#include "mspec/evalharness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "mspec/config_json.hpp"
#include "mspec/error.hpp"
#include "mspec/hermite.hpp"
#include "mspec/moments.hpp"
#include "mspec/rng.hpp"
#include "mspec/threading.hpp"

namespace mspec {

using nlohmann::json;

McError l2_error_mc(const ReluNetwork& net, const Hypothesis& h, std::size_t n_eval,
                    std::uint64_t seed, int threads) {
  if (net.dim != h.basis.rows)
    throw Error(ErrorKind::ShapeMismatch, "l2_error_mc: model vs hypothesis dim");
  if (n_eval == 0) throw Error(ErrorKind::InvalidArgument, "l2_error_mc: n_eval = 0");
  const std::size_t d = net.dim;
  const CounterRng rng(seed, rng_stream::kEval);
  const std::uint64_t pairs_per_sample = (d + 1) / 2;

  // per-point squared differences, then fixed-tree totals
  std::vector<double> sq(n_eval);
  const std::size_t block = 1024;
  const std::size_t n_blocks = (n_eval + block - 1) / block;
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    std::vector<double> x(d);
    const std::size_t lo = b * block, hi = std::min(n_eval, lo + block);
    std::vector<double> xs((hi - lo) * d);
    for (std::size_t i = lo; i < hi; ++i)
      rng.gaussian_fill(std::span<double>(xs.data() + (i - lo) * d, d),
                        i * pairs_per_sample);
    const std::vector<double> pred = predict_batch(h, xs.data(), hi - lo, 1);
    for (std::size_t i = lo; i < hi; ++i) {
      const double diff =
          pred[i - lo] - evaluate(net, std::span<const double>(xs.data() + (i - lo) * d, d));
      sq[i] = diff * diff;
    }
  });

  const std::vector<double> totals = fixed_tree_sum(
      n_eval, 2, 1, [&](std::size_t first, std::size_t last, double* acc) {
        for (std::size_t i = first; i < last; ++i) {
          acc[0] += sq[i];
          acc[1] += sq[i] * sq[i];
        }
      });

  McError out;
  out.n = n_eval;
  const double n = static_cast<double>(n_eval);
  out.mean_sq = totals[0] / n;
  const double var_sq = std::max(0.0, totals[1] / n - out.mean_sq * out.mean_sq);
  out.se_sq = std::sqrt(var_sq / n);
  out.error = std::sqrt(std::max(0.0, out.mean_sq));

  if (n_eval > 1) {
    // jackknife over leave-one-out sqrt estimates
    double mean_theta = 0.0;
    std::vector<double> theta(n_eval);
    for (std::size_t i = 0; i < n_eval; ++i) {
      theta[i] = std::sqrt(std::max(0.0, (totals[0] - sq[i]) / (n - 1)));
      mean_theta += theta[i];
    }
    mean_theta /= n;
    double s = 0.0;
    for (std::size_t i = 0; i < n_eval; ++i)
      s += (theta[i] - mean_theta) * (theta[i] - mean_theta);
    out.se = std::sqrt(s * (n - 1) / n);
  }
  return out;
}

namespace {

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// |M_m|^2 = c_m^2 sum_ij w_i w_j (v_i.v_j)^m from pairwise dots
double analytic_moment_norm_sq(const ReluNetwork& net, const Matrix& vv, double cm,
                               std::size_t m) {
  if (cm == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < net.width; ++i)
    for (std::size_t j = 0; j < net.width; ++j)
      s += net.weights[i] * net.weights[j] * pow_int(vv(i, j), static_cast<int>(m));
  return cm * cm * std::max(0.0, s);
}

}  // namespace

AnalyticError l2_error_analytic(const ReluNetwork& net, const Hypothesis& h,
                                std::size_t m_max) {
  if (net.dim != h.basis.rows)
    throw Error(ErrorKind::ShapeMismatch, "l2_error_analytic: model vs hypothesis dim");
  const std::size_t k = net.width;
  const std::size_t degree = h.degree;
  m_max = std::max({m_max, degree, std::size_t{4}});

  Matrix vv(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < net.dim; ++c) s += net.dirs[i][c] * net.dirs[j][c];
      vv(i, j) = s;
    }
  // projected directions in basis coordinates
  std::vector<std::vector<double>> bv(k, std::vector<double>(h.basis.cols, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < h.basis.cols; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < net.dim; ++r) s += h.basis(r, c) * net.dirs[i][r];
      bv[i][c] = s;
    }

  const std::vector<double> cm = relu_coeff_all(m_max);
  AnalyticError out;
  out.m_max = m_max;
  out.per_order_errors.resize(degree + 1, 0.0);
  double total_sq = 0.0;

  for (std::size_t m = 0; m <= degree; ++m) {
    // |lift(P_m) - M_m|^2 = |P_m|^2 - 2 <P_m, proj M_m> + |M_m|^2
    const SymTensor& p = h.coeffs[m];
    const double pp = inner(p, p);
    double cross = 0.0;
    if (cm[m] != 0.0) {
      for (std::size_t i = 0; i < k; ++i) {
        if (net.weights[i] == 0.0) continue;
        const SymTensor vpow = power(bv[i], m);
        cross += net.weights[i] * inner(p, vpow);
      }
      cross *= cm[m];
    }
    const double mm = analytic_moment_norm_sq(net, vv, cm[m], m);
    const double err_sq = std::max(0.0, pp - 2.0 * cross + mm);
    out.per_order_errors[m] = std::sqrt(err_sq);
    total_sq += err_sq;
  }

  for (std::size_t m = degree + 1; m <= m_max; ++m)
    out.tail_exact += analytic_moment_norm_sq(net, vv, cm[m], m);
  total_sq += out.tail_exact;

  // beyond m_max: continue the exact |M_m|^2 sum (incremental pairwise-dot
  // powers) until c_m^2 < 1e-16 or the dot powers vanish
  std::vector<double> hz(m_max + 1);
  hermite_all_into(m_max, 0.0, hz.data());
  double hm2 = hz[m_max - 1];  // h_{m-2}(0) for the first m below
  double hm1 = hz[m_max];
  const double inv_sqrt_2pi = 0.3989422804014326779;
  Matrix vp(k, k);  // (v_i.v_j)^m, updated per order
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      vp(i, j) = std::pow(vv(i, j), static_cast<double>(m_max + 1));
  for (std::size_t m = m_max + 1;; ++m) {
    if (m % 2 == 0) {
      const double cmv = hm2 * inv_sqrt_2pi /
                         std::sqrt(static_cast<double>(m) * static_cast<double>(m - 1));
      double norm_sq = 0.0;
      double vp_max = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          norm_sq += net.weights[i] * net.weights[j] * vp(i, j);
          vp_max = std::max(vp_max, std::fabs(vp(i, j)));
        }
      out.tail_bound += cmv * cmv * std::max(0.0, norm_sq);
      if (cmv * cmv < 1e-16 || vp_max < 1e-30) break;
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) vp(i, j) *= vv(i, j);
    // h_{m-1}(0) = -sqrt(m-2) h_{m-3}(0) / sqrt(m-1)
    const double next = -std::sqrt(static_cast<double>(m - 1)) * hm2 /
                        std::sqrt(static_cast<double>(m));
    hm2 = hm1;
    hm1 = next;
    if (m > 3'000'000) break;  // safety; c_m^2 < 1e-16 long before this
  }
  total_sq += out.tail_bound;
  out.total = std::sqrt(std::max(0.0, total_sq));
  return out;
}

Hypothesis make_analytic_hypothesis(const ReluNetwork& net, const LearnConfig& config) {
  config.validate();
  if (config.d != net.dim || config.k < 1)
    throw Error(ErrorKind::InvalidArgument, "make_analytic_hypothesis: config/net mismatch");
  const std::size_t cutoff = config.effective_cutoff();
  std::vector<SymTensor> t;
  t.reserve(cutoff);
  for (std::size_t m = 1; m <= cutoff; ++m) t.push_back(analytic_moment(net, m));
  const Matrix a = build_quadratic_form(t);
  SubspaceResult sr = top_k_subspace(a, config.k, config.eigen_tie_tol);

  bool degenerate = true;
  for (double ev : sr.eigenvalues)
    if (ev > config.degeneracy_threshold) degenerate = false;
  if (degenerate) {
    sr.basis = Matrix(config.d, config.k);
    for (std::size_t c = 0; c < config.k; ++c) sr.basis(c, c) = 1.0;
  }

  const std::size_t degree = config.effective_degree();
  Hypothesis h;
  h.basis = sr.basis;
  h.degree = degree;
  h.degenerate_subspace = degenerate;
  const std::vector<double> cm = relu_coeff_all(degree);
  std::vector<std::vector<double>> bv(net.width, std::vector<double>(config.k, 0.0));
  for (std::size_t i = 0; i < net.width; ++i)
    for (std::size_t c = 0; c < config.k; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < net.dim; ++r) s += h.basis(r, c) * net.dirs[i][r];
      bv[i][c] = s;
    }
  for (std::size_t m = 0; m <= degree; ++m) {
    SymTensor p(config.k, m);
    if (cm[m] != 0.0)
      for (std::size_t i = 0; i < net.width; ++i)
        if (net.weights[i] != 0.0) axpy(p, cm[m] * net.weights[i], power(bv[i], m));
    h.coeffs.push_back(std::move(p));
  }
  return h;
}

double principal_angle(const Matrix& basis, const ReluNetwork& net) {
  // columns of W: orthonormalized network directions
  Matrix vcols(net.dim, net.width);
  for (std::size_t i = 0; i < net.width; ++i)
    for (std::size_t r = 0; r < net.dim; ++r) vcols(r, i) = net.dirs[i][r];
  const Matrix w = orthonormalize(vcols);
  if (w.cols == 0) return 0.0;
  // sin of the largest principal angle is the top singular value of the
  // projection residual (I - BB')W, which stays accurate near zero angle
  const Matrix btw = matmul(transpose(basis), w);
  Matrix resid = w;
  for (std::size_t r = 0; r < w.rows; ++r)
    for (std::size_t c = 0; c < w.cols; ++c)
      for (std::size_t j = 0; j < basis.cols; ++j)
        resid(r, c) -= basis(r, j) * btw(j, c);
  const Matrix gram = matmul(transpose(resid), resid);
  EigResult eig = jacobi_eigh(gram);
  const double max_sq = std::max(0.0, eig.eigenvalues.front());
  return std::asin(std::min(1.0, std::sqrt(max_sq)));
}

json EvalReport::to_json(bool include_timing) const {
  json j;
  j["l2_error_mc"] = mc.error;
  j["l2_error_mc_se"] = mc.se;
  j["mc_mean_sq"] = mc.mean_sq;
  j["mc_mean_sq_se"] = mc.se_sq;
  j["n_eval"] = mc.n;
  if (analytic) {
    j["l2_error_analytic"] = analytic->total;
    j["per_order_errors"] = analytic->per_order_errors;
    j["tail_exact_sq"] = analytic->tail_exact;
    j["tail_bound_sq"] = analytic->tail_bound;
    j["tail_cutoff"] = analytic->m_max;
  }
  if (include_timing) j["runtime_seconds"] = runtime_seconds;
  return j;
}

ExperimentResult run_experiment(const LearnConfig& config, const InstanceSpec& instance,
                                const std::string& out_dir, std::size_t n_eval,
                                bool analytic, bool include_timing) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  if (n_eval == 0)
    throw Error(ErrorKind::InvalidArgument, "run_experiment: n_eval must be >= 1");

  ExperimentResult res;
  res.net = instance.model_file.empty()
                ? random_network(instance.d, instance.k, instance.profile,
                                 instance.seed, instance.theta)
                : read_model_file(instance.model_file);
  if (res.net.dim != config.d)
    throw Error(ErrorKind::ShapeMismatch, "run_experiment: instance dim != config.d");

  const SampleSource sub = make_source(res.net, config.effective_n_subspace(),
                                       config.seed, rng_stream::kSubspace,
                                       config.noise_sigma);
  const SampleSource reg = make_source(res.net, config.effective_n_regression(),
                                       config.seed, rng_stream::kRegression,
                                       config.noise_sigma);
  res.learned = learn(sub, reg, config);

  res.report.mc = l2_error_mc(res.net, res.learned.hypothesis, n_eval,
                              config.seed + 0x517cc1b727220a95ULL, config.threads);
  if (analytic)
    res.report.analytic = l2_error_analytic(res.net, res.learned.hypothesis);
  res.report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["command"] = "experiment";
  manifest["config"] = learn_config_to_json(config);
  manifest["instance"] = {{"d", instance.d},
                          {"k", instance.k},
                          {"profile", profile_name(instance.profile)},
                          {"theta", instance.theta},
                          {"seed", instance.seed},
                          {"model_file", instance.model_file}};
  manifest["n_eval"] = n_eval;
  manifest["eigenvalues"] = res.learned.eigenvalues;
  manifest["moment_cutoff"] = res.learned.moment_cutoff;
  manifest["degree"] = res.learned.hypothesis.degree;
  manifest["degree_capped"] = res.learned.degree_capped;
  manifest["sample_counts"] = {{"subspace", res.learned.n_subspace_used},
                               {"regression", res.learned.n_regression_used},
                               {"eval", n_eval}};
  manifest["warnings"] = res.learned.warnings;
  manifest["subspace_angle"] = principal_angle(res.learned.hypothesis.basis, res.net);
  if (include_timing) manifest["runtime_seconds"] = res.report.runtime_seconds;
  res.manifest = manifest;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_model_file(out_dir + "/model.json", res.net);
    write_hypothesis_file(out_dir + "/hypothesis.bin", res.learned.hypothesis);
    std::ofstream mos(out_dir + "/manifest.json", std::ios::binary);
    mos << manifest.dump(2) << "\n";
    std::ofstream ros(out_dir + "/report.json", std::ios::binary);
    ros << res.report.to_json(include_timing).dump(2) << "\n";
    if (!mos || !ros) throw Error(ErrorKind::Io, "failed writing experiment outputs");
  }
  return res;
}

}  // namespace mspec
