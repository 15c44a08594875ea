#include "mspec/schur.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mspec/error.hpp"
#include "mspec/matrix.hpp"
#include "mspec/rng.hpp"

namespace mspec {

namespace {

constexpr std::size_t kMonomialBudget = 2'000'000;

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

double binom_dbl(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0)
      throw Error(ErrorKind::InvalidArgument, "partition parts must be >= 0");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw Error(ErrorKind::InvalidArgument, "partition parts must be non-increasing");
  }
  size_ = 0;
  for (int p : parts_) size_ += p;
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < parts_.size(); ++i)
    os << (i ? "," : "") << parts_[i];
  os << ")";
  return os.str();
}

void SymmetricPolynomial::add_term(const std::vector<int>& exponents,
                                   const mpz_class& coeff) {
  if (exponents.size() != num_vars_)
    throw Error(ErrorKind::ShapeMismatch, "polynomial exponent arity mismatch");
  if (coeff == 0) return;
  auto it = mono_.find(exponents);
  if (it == mono_.end()) {
    if (mono_.size() >= kMonomialBudget)
      throw Error(ErrorKind::MemoryBudget, "polynomial monomial budget exceeded");
    mono_.emplace(exponents, coeff);
  } else {
    it->second += coeff;
    if (it->second == 0) mono_.erase(it);
  }
}

double SymmetricPolynomial::evaluate(std::span<const double> x) const {
  if (x.size() != num_vars_)
    throw Error(ErrorKind::ShapeMismatch, "polynomial evaluate arity mismatch");
  double s = 0.0;
  for (const auto& [e, c] : mono_) {
    double m = c.get_d();
    for (std::size_t j = 0; j < num_vars_; ++j) m *= pow_int(x[j], e[j]);
    s += m;
  }
  return s;
}

mpz_class SymmetricPolynomial::value_at_ones() const {
  mpz_class s = 0;
  for (const auto& [e, c] : mono_) s += c;
  return s;
}

SymmetricPolynomial SymmetricPolynomial::operator+(const SymmetricPolynomial& o) const {
  SymmetricPolynomial r = *this;
  for (const auto& [e, c] : o.mono_) r.add_term(e, c);
  return r;
}

SymmetricPolynomial SymmetricPolynomial::operator-(const SymmetricPolynomial& o) const {
  SymmetricPolynomial r = *this;
  for (const auto& [e, c] : o.mono_) r.add_term(e, -c);
  return r;
}

SymmetricPolynomial SymmetricPolynomial::operator*(const SymmetricPolynomial& o) const {
  if (num_vars_ != o.num_vars_)
    throw Error(ErrorKind::ShapeMismatch, "polynomial multiply arity mismatch");
  SymmetricPolynomial r(num_vars_);
  std::vector<int> e(num_vars_);
  for (const auto& [ea, ca] : mono_)
    for (const auto& [eb, cb] : o.mono_) {
      for (std::size_t j = 0; j < num_vars_; ++j) e[j] = ea[j] + eb[j];
      r.add_term(e, ca * cb);
    }
  return r;
}

SymmetricPolynomial complete_homogeneous(int degree, std::size_t n_vars) {
  SymmetricPolynomial p(n_vars);
  if (degree < 0) return p;
  std::vector<int> e;
  multiindex_first(n_vars, static_cast<std::size_t>(degree), e);
  do {
    p.add_term(e, 1);
  } while (multiindex_next(e));
  return p;
}

SymmetricPolynomial jacobi_trudi(const Partition& lambda, std::size_t n_vars) {
  const std::size_t ell = lambda.num_parts();
  if (ell == 0) {
    SymmetricPolynomial one(n_vars);
    one.add_term(std::vector<int>(n_vars, 0), 1);
    return one;
  }
  if (ell > n_vars && n_vars > 0) {
    // more rows than variables: s_lambda vanishes, but the determinant below
    // also evaluates to the zero polynomial; compute it anyway for ell small.
  }
  // matrix of complete homogeneous polynomials y_{lambda_i + j - i}
  std::vector<std::vector<SymmetricPolynomial>> y(ell,
                                                  std::vector<SymmetricPolynomial>(ell));
  for (std::size_t i = 0; i < ell; ++i)
    for (std::size_t j = 0; j < ell; ++j)
      y[i][j] = complete_homogeneous(
          lambda.part(i) + static_cast<int>(j) - static_cast<int>(i), n_vars);

  // determinant by permutation expansion; ell stays small (<= number of
  // partition parts)
  SymmetricPolynomial det(n_vars);
  std::vector<std::size_t> perm(ell);
  for (std::size_t i = 0; i < ell; ++i) perm[i] = i;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < ell; ++i)
      for (std::size_t j = i + 1; j < ell; ++j)
        if (perm[i] > perm[j]) sign = -sign;
    SymmetricPolynomial prod(n_vars);
    prod.add_term(std::vector<int>(n_vars, 0), sign);
    bool zero = false;
    for (std::size_t i = 0; i < ell && !zero; ++i) {
      if (y[i][perm[i]].is_zero()) zero = true;
      else prod = prod * y[i][perm[i]];
    }
    if (!zero) det = det + prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

double schur_bialternant(const Partition& lambda, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "schur_bialternant: empty x");
  if (lambda.num_parts() > n) return 0.0;

  double max_abs = 0.0;
  for (double xi : x) max_abs = std::max(max_abs, std::fabs(xi));
  bool distinct = true;
  for (std::size_t i = 0; i < n && distinct; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(x[i] - x[j]) <= 1e-12 * (1.0 + max_abs)) {
        distinct = false;
        break;
      }
  if (!distinct) return jacobi_trudi(lambda, n).evaluate(x);

  Matrix num(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      num(i, j) = pow_int(x[i], lambda.part(j) + static_cast<int>(n - 1 - j));
  const double det_num = lu_det(lu_factor(num));
  // Vandermonde denominator det([x_i^{n-j}]) = prod_{i<j} (x_i - x_j)
  double det_den = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) det_den *= (x[i] - x[j]);
  return det_num / det_den;
}

SymTensor tensor_schur(const Partition& lambda,
                       const std::vector<std::vector<double>>& vs) {
  if (vs.empty()) throw Error(ErrorKind::InvalidArgument, "tensor_schur: no vectors");
  const std::size_t k = vs.size();
  const std::size_t dim = vs[0].size();
  for (const auto& v : vs)
    if (v.size() != dim)
      throw Error(ErrorKind::ShapeMismatch, "tensor_schur: mixed vector dims");
  const std::size_t order = static_cast<std::size_t>(lambda.size());
  checked_entry_count(dim, order);

  const SymmetricPolynomial s = jacobi_trudi(lambda, k);
  SymTensor out(dim, order);
  for (const auto& [e, c] : s.monomials()) {
    SymTensor term = SymTensor::scalar(1.0);
    bool first = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (e[i] == 0) continue;
      SymTensor p = power(vs[i], static_cast<std::size_t>(e[i]));
      if (first) {
        term = std::move(p);
        first = false;
      } else {
        term = symmetrize_product(term, p);
      }
    }
    if (first) {
      // constant monomial: only possible when |lambda| = 0
      out[0] += c.get_d();
      continue;
    }
    axpy(out, c.get_d(), term);
  }
  return out;
}

std::vector<double> cramer_coefficients(std::size_t k, std::size_t t,
                                        std::span<const double> xs) {
  if (xs.size() != k || k == 0)
    throw Error(ErrorKind::InvalidArgument, "cramer_coefficients: need k values");
  if (t < k)
    throw Error(ErrorKind::InvalidArgument, "cramer_coefficients: need t >= k");
  Matrix v(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t a = 0; a < k; ++a) v(i, a) = pow_int(xs[i], static_cast<int>(a));
  if (condition_inf(v) > 1e12)
    throw Error(ErrorKind::Singular,
                "cramer_coefficients: Vandermonde system condition exceeds 1e12");
  std::vector<double> rhs(k);
  for (std::size_t i = 0; i < k; ++i) rhs[i] = pow_int(xs[i], static_cast<int>(t));
  return lu_solve(lu_factor(v), rhs);
}

VerifyReport verify_scalar_bound(std::size_t k, std::size_t t, std::size_t trials,
                                 std::uint64_t rng_seed) {
  if (t < k) throw Error(ErrorKind::InvalidArgument, "verify_scalar_bound: t >= k required");
  VerifyReport rep;
  rep.suite = "scalar-bound";
  rep.trials = trials;
  const double allowance = binom_dbl(t, k - 1) * std::pow(2.0 * k, static_cast<double>(k));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const CounterRng rng(rng_seed ^ (trial * 0x9E3779B97F4A7C15ULL), rng_stream::kTrial);
    std::vector<double> w(k), x(k);
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = rng.uniform(2 * i, -1.0, 1.0);
      x[i] = rng.uniform(2 * i + 1, -1.0, 1.0);
    }
    double max_low = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      double ms = 0.0;
      for (std::size_t i = 0; i < k; ++i) ms += w[i] * pow_int(x[i], static_cast<int>(s));
      max_low = std::max(max_low, std::fabs(ms));
    }
    double mt = 0.0;
    for (std::size_t i = 0; i < k; ++i) mt += w[i] * pow_int(x[i], static_cast<int>(t));
    const double bound = allowance * max_low;
    const double ratio = bound > 0 ? std::fabs(mt) / bound
                                   : (std::fabs(mt) > 0 ? HUGE_VAL : 0.0);
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (std::fabs(mt) > bound + 1e-12) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

namespace {

// |sum_i w_i v_i^(x)t|^2 = sum_{ij} w_i w_j (v_i . v_j)^t
double moment_norm(const std::vector<double>& w, const Matrix& dots, std::size_t t) {
  const std::size_t k = w.size();
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      s += w[i] * w[j] * pow_int(dots(i, j), static_cast<int>(t));
  return std::sqrt(std::max(0.0, s));
}

}  // namespace

VerifyReport verify_tensor_recursion(std::size_t k, std::size_t t, std::size_t dim,
                                     std::size_t trials, std::uint64_t rng_seed) {
  if (t < k)
    throw Error(ErrorKind::InvalidArgument, "verify_tensor_recursion: t >= k required");
  checked_entry_count(dim, t);
  VerifyReport rep;
  rep.suite = "tensor-recursion";
  rep.trials = trials;
  double worst_residual = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const CounterRng rng(rng_seed ^ (trial * 0xBF58476D1CE4E5B9ULL), rng_stream::kTrial);
    std::vector<std::vector<double>> vs(k, std::vector<double>(dim));
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = rng.uniform(i, -1.0, 1.0);
      double n2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        vs[i][j] = rng.uniform(k + i * dim + j, -1.0, 1.0);
        n2 += vs[i][j] * vs[i][j];
      }
      // keep |v_i| <= 1, nonuniformly sized
      const double target = rng.uniform((k + 1) * dim + k + i, 0.1, 1.0);
      if (n2 > 0) {
        const double f = target / std::sqrt(n2);
        for (double& c : vs[i]) c *= f;
      }
    }

    SymTensor mt(dim, t);
    for (std::size_t i = 0; i < k; ++i) axpy(mt, w[i], power(vs[i], t));

    SymTensor rhs(dim, t);
    for (std::size_t a = 0; a < k; ++a) {
      // lambda = (t-k+1, 1^{k-1-a})
      std::vector<int> parts;
      parts.push_back(static_cast<int>(t - k + 1));
      for (std::size_t j = 0; j < k - 1 - a; ++j) parts.push_back(1);
      const Partition lambda(std::move(parts));
      const SymTensor s = tensor_schur(lambda, vs);
      SymTensor ma(dim, a);
      if (a == 0) {
        double w0 = 0.0;
        for (double wi : w) w0 += wi;
        ma = SymTensor(dim, 0);
        ma[0] = w0;
      } else {
        for (std::size_t i = 0; i < k; ++i) axpy(ma, w[i], power(vs[i], a));
      }
      const double sign = ((k + a + 1) % 2 == 0) ? 1.0 : -1.0;
      // Sym(M_a (x) s_lambda); both factors symmetric
      SymTensor term = (a == 0) ? scale(s, ma[0]) : symmetrize_product(ma, s);
      axpy(rhs, sign, term);
    }

    SymTensor diff = add(mt, scale(rhs, -1.0));
    const double residual = norm2(diff);
    const double scale_term = 1.0 + norm2(mt);
    worst_residual = std::max(worst_residual, residual / scale_term);
    if (residual > 1e-8 * scale_term) ++rep.violations;
  }
  rep.worst_ratio = worst_residual / 1e-8;
  rep.pass = rep.violations == 0;
  std::ostringstream os;
  os << "worst residual / (1+|M_t|) = " << worst_residual;
  rep.detail = os.str();
  return rep;
}

VerifyReport verify_even_bound(std::size_t k, std::size_t t_even, std::size_t dim,
                               std::size_t trials, std::uint64_t rng_seed) {
  if (t_even % 2 != 0 || t_even < 2 * k)
    throw Error(ErrorKind::InvalidArgument,
                "verify_even_bound: t must be even and >= 2k");
  VerifyReport rep;
  rep.suite = "even-bound";
  rep.trials = trials;
  const double allowance =
      binom_dbl(t_even, k - 1) * std::pow(2.0 * k, static_cast<double>(k));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const CounterRng rng(rng_seed ^ (trial * 0x94D049BB133111EBULL), rng_stream::kTrial);
    std::vector<std::vector<double>> vs(k, std::vector<double>(dim));
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = rng.uniform(i, -1.0, 1.0);
      double n2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        vs[i][j] = rng.uniform(k + i * dim + j, -1.0, 1.0);
        n2 += vs[i][j] * vs[i][j];
      }
      const double target = rng.uniform((k + 1) * dim + k + i, 0.1, 1.0);
      if (n2 > 0) {
        const double f = target / std::sqrt(n2);
        for (double& c : vs[i]) c *= f;
      }
    }
    Matrix dots(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double d = 0.0;
        for (std::size_t c = 0; c < dim; ++c) d += vs[i][c] * vs[j][c];
        dots(i, j) = d;
      }
    double max_low = 0.0;
    for (std::size_t s = 0; s < 2 * k; s += 2)
      max_low = std::max(max_low, moment_norm(w, dots, s));
    const double mt = moment_norm(w, dots, t_even);
    const double bound = allowance * max_low;
    const double ratio =
        bound > 0 ? mt / bound : (mt > 1e-12 ? HUGE_VAL : 0.0);
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (mt > bound + 1e-12) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace mspec
