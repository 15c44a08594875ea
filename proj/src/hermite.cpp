#include "mspec/hermite.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "mspec/error.hpp"
#include "mspec/matrix.hpp"

namespace mspec {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

}  // namespace

double hermite_eval(std::size_t m, double t) {
  if (!std::isfinite(t))
    throw Error(ErrorKind::InvalidArgument, "hermite_eval: non-finite argument");
  double hm1 = 0.0;  // h_{j-1}
  double h = 1.0;    // h_j
  for (std::size_t j = 0; j < m; ++j) {
    const double next =
        (t * h - std::sqrt(static_cast<double>(j)) * hm1) /
        std::sqrt(static_cast<double>(j + 1));
    hm1 = h;
    h = next;
  }
  return h;
}

void hermite_all_into(std::size_t m_max, double t, double* out) {
  out[0] = 1.0;
  if (m_max == 0) return;
  out[1] = t;
  for (std::size_t j = 1; j < m_max; ++j)
    out[j + 1] = (t * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) /
                 std::sqrt(static_cast<double>(j + 1));
}

std::vector<double> hermite_all(std::size_t m_max, double t) {
  if (!std::isfinite(t))
    throw Error(ErrorKind::InvalidArgument, "hermite_all: non-finite argument");
  std::vector<double> h(m_max + 1);
  hermite_all_into(m_max, t, h.data());
  return h;
}

double relu_coeff(std::size_t m) {
  if (m == 0) return kInvSqrt2Pi;
  if (m == 1) return 0.5;
  if (m % 2 == 1) return 0.0;
  const double h0 = hermite_eval(m - 2, 0.0);
  return h0 * kInvSqrt2Pi /
         std::sqrt(static_cast<double>(m) * static_cast<double>(m - 1));
}

std::vector<double> relu_coeff_all(std::size_t m_max) {
  std::vector<double> c(m_max + 1, 0.0);
  c[0] = kInvSqrt2Pi;
  if (m_max >= 1) c[1] = 0.5;
  if (m_max < 2) return c;
  const std::vector<double> h0 = hermite_all(m_max, 0.0);
  for (std::size_t m = 2; m <= m_max; m += 2)
    c[m] = h0[m - 2] * kInvSqrt2Pi /
           std::sqrt(static_cast<double>(m) * static_cast<double>(m - 1));
  return c;
}

SymTensor hermite_tensor(std::size_t m, std::span<const double> x) {
  const std::size_t n = x.size();
  SymTensor t(n, m);
  // Entry at alpha is prod_j h_{alpha_j}(x_j) / sqrt(w(alpha)); the
  // normalized form avoids factorial overflow at large m.
  std::vector<std::vector<double>> h(n);
  for (std::size_t j = 0; j < n; ++j) h[j] = hermite_all(m, x[j]);
  const auto& w = t.weights();
  std::vector<int> alpha;
  multiindex_first(n, m, alpha);
  std::size_t idx = 0;
  do {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (alpha[j] > 0) p *= h[j][alpha[j]];
    t[idx] = p / std::sqrt(w[idx]);
    ++idx;
  } while (multiindex_next(alpha));
  return t;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the orthogonal
// family, weights are mu_0 times squared first eigenvector components.
QuadratureRule golub_welsch(const std::vector<double>& diag,
                            const std::vector<double>& offdiag, double mu0) {
  const std::size_t n = diag.size();
  Matrix j(n, n);
  for (std::size_t i = 0; i < n; ++i) j(i, i) = diag[i];
  for (std::size_t i = 0; i + 1 < n; ++i) j(i, i + 1) = j(i + 1, i) = offdiag[i];
  EigResult eig = jacobi_eigh(j);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // ascending nodes
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = n - 1 - i;
    rule.nodes[i] = eig.eigenvalues[src];
    const double v0 = eig.eigenvectors(0, src);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

const QuadratureRule& cached_rule(int family, std::size_t n) {
  static std::mutex mu;
  static std::map<std::pair<int, std::size_t>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(family, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<double> diag(n, 0.0), off(n ? n - 1 : 0);
  if (family == 0) {
    for (std::size_t i = 0; i + 1 < n; ++i)
      off[i] = std::sqrt(static_cast<double>(i + 1));
  } else {
    for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * i + 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = static_cast<double>(i + 1);
  }
  auto [pos, ok] = cache.emplace(key, golub_welsch(diag, off, 1.0));
  return pos->second;
}

}  // namespace

const QuadratureRule& gauss_hermite(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "gauss_hermite: n = 0");
  return cached_rule(0, n);
}

const QuadratureRule& gauss_laguerre(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "gauss_laguerre: n = 0");
  return cached_rule(1, n);
}

double relu_coeff_quadrature(std::size_t m, std::size_t n_nodes) {
  if (m % 2 == 0) {
    // E[ReLU(G) h_m(G)] = (1/sqrt(2 pi)) int_0^inf h_m(sqrt(2u)) e^-u du
    const QuadratureRule& rule = gauss_laguerre(n_nodes);
    double s = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i)
      s += rule.weights[i] * hermite_eval(m, std::sqrt(2.0 * rule.nodes[i]));
    return s * kInvSqrt2Pi;
  }
  const QuadratureRule& rule = gauss_hermite(n_nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double t = rule.nodes[i];
    if (t > 0) s += rule.weights[i] * t * hermite_eval(m, t);
  }
  return s;
}

}  // namespace mspec
