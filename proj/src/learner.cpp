#include "mspec/learner.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "mspec/error.hpp"
#include "mspec/hermite.hpp"
#include "mspec/serialize.hpp"
#include "mspec/threading.hpp"

namespace mspec {

using nlohmann::json;

void LearnConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "config: k must be >= 1");
  if (d < k) throw Error(ErrorKind::InvalidArgument, "config: need d >= k");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorKind::InvalidArgument, "config: epsilon must be in (0,1)");
  if (sample_multiplier <= 0)
    throw Error(ErrorKind::InvalidArgument, "config: sample_multiplier must be > 0");
  if (effective_n_subspace() == 0 || effective_n_regression() == 0)
    throw Error(ErrorKind::InvalidArgument, "config: sample counts must be >= 1");
}

std::size_t LearnConfig::effective_cutoff() const {
  return moment_cutoff ? moment_cutoff : 4 * k;
}

std::size_t LearnConfig::effective_degree(bool* capped) const {
  std::size_t deg = degree_D;
  if (deg == 0)
    deg = static_cast<std::size_t>(
        std::ceil(c_degree * std::pow(epsilon, -4.0 / 3.0)));
  deg = std::max(deg, effective_cutoff());
  bool hit = false;
  // largest order drives the budget: C(k + deg - 1, deg)
  while (deg > effective_cutoff()) {
    try {
      checked_entry_count(k, deg);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MemoryBudget) throw;
      hit = true;
      --deg;
    }
  }
  if (capped) *capped = hit;
  return deg;
}

std::size_t LearnConfig::effective_n_subspace() const {
  return static_cast<std::size_t>(std::llround(
      static_cast<double>(n_subspace) * sample_multiplier));
}

std::size_t LearnConfig::effective_n_regression() const {
  return static_cast<std::size_t>(std::llround(
      static_cast<double>(n_regression) * sample_multiplier));
}

Matrix build_quadratic_form(std::span<const SymTensor> tensors) {
  if (tensors.empty())
    throw Error(ErrorKind::InvalidArgument, "build_quadratic_form: no tensors");
  const std::size_t d = tensors.front().dim();
  Matrix a(d, d);
  for (const SymTensor& t : tensors) {
    if (t.dim() != d)
      throw Error(ErrorKind::ShapeMismatch, "build_quadratic_form: mixed dims");
    const std::vector<double> g = gram_matrix(t);
    for (std::size_t i = 0; i < d * d; ++i) a.a[i] += g[i];
  }
  return a;
}

SubspaceResult top_k_subspace(const Matrix& a, std::size_t k, double tie_tol) {
  if (k == 0 || k > a.rows)
    throw Error(ErrorKind::InvalidArgument, "top_k_subspace: need 1 <= k <= d");
  EigResult eig = jacobi_eigh(a, tie_tol);
  SubspaceResult out;
  out.eigenvalues = eig.eigenvalues;
  out.basis = Matrix(a.rows, k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < a.rows; ++r)
      out.basis(r, c) = eig.eigenvectors(r, c);
  return out;
}

LearnResult learn(const SampleSource& samples_subspace,
                  const SampleSource& samples_regression, const LearnConfig& config) {
  config.validate();
  if (samples_subspace.dim != config.d || samples_regression.dim != config.d)
    throw Error(ErrorKind::ShapeMismatch, "learn: sample dim does not match config.d");

  LearnResult result;
  result.moment_cutoff = config.effective_cutoff();
  result.n_subspace_used = std::min(config.effective_n_subspace(), samples_subspace.n);
  result.n_regression_used =
      std::min(config.effective_n_regression(), samples_regression.n);
  if (result.n_subspace_used < config.effective_n_subspace() ||
      result.n_regression_used < config.effective_n_regression())
    result.warnings.push_back("fewer samples available than configured");

  SampleSource sub = samples_subspace;
  sub.n = result.n_subspace_used;
  SampleSource reg = samples_regression;
  reg.n = result.n_regression_used;

  // step 2: T_1..T_{4k}
  const std::vector<SymTensor> t =
      estimate_moment_range(sub, 1, result.moment_cutoff, {}, config.threads);

  // step 3: quadratic form
  const Matrix a = build_quadratic_form(t);

  // step 4: top-k eigenspace
  SubspaceResult sr = top_k_subspace(a, config.k, config.eigen_tie_tol);
  result.eigenvalues = sr.eigenvalues;
  bool degenerate = true;
  for (double ev : sr.eigenvalues)
    if (ev > config.degeneracy_threshold) {
      degenerate = false;
      break;
    }
  if (degenerate) {
    result.warnings.push_back(
        "all eigenvalues below degeneracy threshold; regressing on the first k "
        "coordinate directions");
    sr.basis = Matrix(config.d, config.k);
    for (std::size_t c = 0; c < config.k; ++c) sr.basis(c, c) = 1.0;
  }

  // step 5: P_0..P_D inside the subspace, fresh samples
  bool capped = false;
  const std::size_t degree = config.effective_degree(&capped);
  result.degree_capped = capped;
  if (capped)
    result.warnings.push_back("degree_D capped by the entry budget at " +
                              std::to_string(degree));
  std::vector<SymTensor> p =
      estimate_moment_range(reg, 0, degree, sr.basis, config.threads);

  // step 6: package
  result.hypothesis.basis = std::move(sr.basis);
  result.hypothesis.coeffs = std::move(p);
  result.hypothesis.degree = degree;
  result.hypothesis.degenerate_subspace = degenerate;
  return result;
}

namespace {

// sum_m <P_m, H_m(z)> = sum_m sum_alpha sqrt(w_alpha) P_m[alpha] prod_j
// h_{alpha_j}(z_j); scaled[m] caches sqrt(w) * P_m.
struct PredictWorkspace {
  std::vector<std::vector<double>> scaled;
  std::vector<double> z;
  std::vector<double> hvals;
  std::vector<const double*> h;
  std::size_t k = 0, degree = 0;

  explicit PredictWorkspace(const Hypothesis& hyp) {
    k = hyp.basis.cols;
    degree = hyp.degree;
    scaled.resize(hyp.coeffs.size());
    for (std::size_t m = 0; m < hyp.coeffs.size(); ++m) {
      const SymTensor& p = hyp.coeffs[m];
      const auto& w = p.weights();
      scaled[m].resize(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        scaled[m][i] = p[i] * std::sqrt(w[i]);
    }
    z.resize(k);
    hvals.resize(k * (degree + 1));
    h.resize(k);
    for (std::size_t j = 0; j < k; ++j) h[j] = hvals.data() + j * (degree + 1);
  }

  double eval(const Hypothesis& hyp, std::span<const double> x) {
    const Matrix& b = hyp.basis;
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < b.rows; ++r) s += b(r, c) * x[r];
      z[c] = s;
    }
    for (std::size_t j = 0; j < k; ++j)
      hermite_all_into(degree, z[j], hvals.data() + j * (degree + 1));
    double total = 0.0;
    for (std::size_t m = 0; m < scaled.size(); ++m) {
      const double* coef = scaled[m].data();
      if (k == 1) {
        total += coef[0] * h[0][m];
      } else {
        total += dot_order(h, k - 1, static_cast<int>(m), 1.0, coef);
      }
    }
    return total;
  }

 private:
  static double dot_order(const std::vector<const double*>& h, std::size_t j,
                          int rem, double prod, const double*& coef) {
    if (j == 1) {
      const double* h1 = h[1];
      const double* h0 = h[0];
      double s = 0.0;
      for (int t = 0; t <= rem; ++t) s += coef[t] * h1[t] * h0[rem - t];
      coef += rem + 1;
      return prod * s;
    }
    double s = 0.0;
    const double* hj = h[j];
    for (int t = 0; t <= rem; ++t)
      s += dot_order(h, j - 1, rem - t, prod * hj[t], coef);
    return s;
  }
};

}  // namespace

double predict(const Hypothesis& h, std::span<const double> x) {
  if (x.size() != h.basis.rows)
    throw Error(ErrorKind::ShapeMismatch, "predict: input dim mismatch");
  PredictWorkspace ws(h);
  return ws.eval(h, x);
}

std::vector<double> predict_batch(const Hypothesis& h, const double* xs,
                                  std::size_t n, int threads) {
  std::vector<double> out(n);
  const std::size_t d = h.basis.rows;
  const std::size_t block = 1024;
  const std::size_t n_blocks = (n + block - 1) / block;
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    PredictWorkspace ws(h);
    const std::size_t lo = b * block, hi = std::min(n, lo + block);
    for (std::size_t i = lo; i < hi; ++i)
      out[i] = ws.eval(h, std::span<const double>(xs + i * d, d));
  });
  return out;
}

namespace {

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

ResidualDiagnostics residual_orthogonal_mass(const ReluNetwork& net,
                                             const Matrix& basis, std::size_t m_max) {
  const std::size_t d = net.dim;
  const std::size_t k = net.width;
  if (basis.rows != d)
    throw Error(ErrorKind::ShapeMismatch, "residual diagnostics: basis rows != net dim");

  // orthonormal basis of span(B, v_1..v_k) minus span(B): Gram-Schmidt the
  // residuals (I - BB^T) v_i
  std::vector<std::vector<double>> u_basis;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> r(net.dirs[i]);
    for (std::size_t c = 0; c < basis.cols; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += basis(j, c) * r[j];
      for (std::size_t j = 0; j < d; ++j) r[j] -= s * basis(j, c);
    }
    for (const auto& u : u_basis) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += u[j] * r[j];
      for (std::size_t j = 0; j < d; ++j) r[j] -= s * u[j];
    }
    double nrm = 0.0;
    for (double x : r) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > 1e-10) {
      for (double& x : r) x /= nrm;
      u_basis.push_back(std::move(r));
    }
  }

  // pairwise dots of the v_i, of their projections, and of the projection
  // residuals r_i = (I - BB')v_i; rr = vv - pp computed without the
  // catastrophic cancellation of subtracting two near-equal dots
  Matrix vv(k, k), pp(k, k), rr(k, k);
  std::vector<std::vector<double>> bv(k, std::vector<double>(basis.cols, 0.0));
  std::vector<std::vector<double>> res(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < basis.cols; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += basis(j, c) * net.dirs[i][j];
      bv[i][c] = s;
    }
    res[i] = net.dirs[i];
    for (std::size_t c = 0; c < basis.cols; ++c)
      for (std::size_t j = 0; j < d; ++j) res[i][j] -= bv[i][c] * basis(j, c);
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double sv = 0.0, sp = 0.0, sr = 0.0;
      for (std::size_t c = 0; c < d; ++c) sv += net.dirs[i][c] * net.dirs[j][c];
      for (std::size_t c = 0; c < basis.cols; ++c) sp += bv[i][c] * bv[j][c];
      for (std::size_t c = 0; c < d; ++c) sr += res[i][c] * res[j][c];
      vv(i, j) = sv;
      pp(i, j) = sp;
      rr(i, j) = sr;
    }

  const std::vector<double> cm = relu_coeff_all(m_max);
  ResidualDiagnostics diag;
  diag.max_orthogonal_contraction.assign(m_max + 1, 0.0);
  diag.projection_gap.assign(m_max + 1, 0.0);
  for (std::size_t m = 0; m <= m_max; ++m) {
    if (cm[m] == 0.0) continue;
    // |R_m - M_m|^2 = c_m^2 sum_ij w_i w_j [(v_i.v_j)^m - (Pv_i.Pv_j)^m];
    // the bracket is factored as (r_i.r_j) sum_l vv^l pp^{m-1-l}
    double gap2 = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double geo = 0.0;
        for (std::size_t l = 0; l < m; ++l)
          geo += pow_int(vv(i, j), static_cast<int>(l)) *
                 pow_int(pp(i, j), static_cast<int>(m - 1 - l));
        gap2 += net.weights[i] * net.weights[j] * rr(i, j) * geo;
      }
    diag.projection_gap[m] = std::fabs(cm[m]) * std::sqrt(std::max(0.0, gap2));
    if (m == 0) diag.projection_gap[0] = 0.0;  // R_0 = M_0 always

    if (m >= 1) {
      double worst = 0.0;
      for (const auto& u : u_basis) {
        // |M_m u|^2 = c_m^2 sum_ij w_i w_j (v_i.u)(v_j.u)(v_i.v_j)^{m-1}
        std::vector<double> vu(k);
        for (std::size_t i = 0; i < k; ++i) {
          double s = 0.0;
          for (std::size_t c = 0; c < d; ++c) s += net.dirs[i][c] * u[c];
          vu[i] = s;
        }
        double q = 0.0;
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j)
            q += net.weights[i] * net.weights[j] * vu[i] * vu[j] *
                 pow_int(vv(i, j), static_cast<int>(m - 1));
        worst = std::max(worst, std::fabs(cm[m]) * std::sqrt(std::max(0.0, q)));
      }
      diag.max_orthogonal_contraction[m] = worst;
    }
  }
  return diag;
}

void write_hypothesis_file(const std::string& path, const Hypothesis& h) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  os.write("MSPECHYP", 8);
  json header;
  header["dim"] = h.basis.rows;
  header["k"] = h.basis.cols;
  header["degree"] = h.degree;
  header["degenerate_subspace"] = h.degenerate_subspace;
  header["basis"] = h.basis.a;  // row-major
  const std::string hs = header.dump();
  write_u64_le(os, hs.size());
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const SymTensor& p : h.coeffs) write_symtensor(os, p);
  if (!os) throw Error(ErrorKind::Io, "short write to " + path);
}

Hypothesis read_hypothesis_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "MSPECHYP", 8) != 0)
    throw Error(ErrorKind::Parse, "hypothesis file: bad magic");
  const std::uint64_t len = read_u64_le(is);
  if (!is || len > (1u << 20))
    throw Error(ErrorKind::Parse, "hypothesis file: bad header length");
  std::string hs(len, '\0');
  is.read(hs.data(), static_cast<std::streamsize>(len));
  if (!is) throw Error(ErrorKind::Parse, "hypothesis file: truncated header");
  Hypothesis h;
  try {
    const json header = json::parse(hs);
    const std::size_t dim = header.at("dim").get<std::size_t>();
    const std::size_t k = header.at("k").get<std::size_t>();
    h.degree = header.at("degree").get<std::size_t>();
    h.degenerate_subspace = header.value("degenerate_subspace", false);
    h.basis = Matrix(dim, k);
    h.basis.a = header.at("basis").get<std::vector<double>>();
    if (h.basis.a.size() != dim * k)
      throw Error(ErrorKind::Parse, "hypothesis file: basis size mismatch");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("hypothesis header: ") + e.what());
  }
  h.coeffs.reserve(h.degree + 1);
  for (std::size_t m = 0; m <= h.degree; ++m) {
    SymTensor t = read_symtensor(is);
    if (t.order() != m || t.dim() != h.basis.cols)
      throw Error(ErrorKind::Parse, "hypothesis file: tensor shape mismatch");
    h.coeffs.push_back(std::move(t));
  }
  return h;
}

}  // namespace mspec
