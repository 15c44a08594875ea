#include "mspec/symtensor.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "mspec/error.hpp"
#include "mspec/serialize.hpp"

namespace mspec {

namespace {

void require_same_shape(const SymTensor& a, const SymTensor& b, const char* op) {
  if (a.dim() != b.dim() || a.order() != b.order())
    throw Error(ErrorKind::ShapeMismatch,
                std::string(op) + ": shapes (" + std::to_string(a.dim()) + "," +
                    std::to_string(a.order()) + ") vs (" + std::to_string(b.dim()) +
                    "," + std::to_string(b.order()) + ")");
}

void require_dim(const SymTensor& t, std::size_t dim, const char* op) {
  if (t.dim() != dim)
    throw Error(ErrorKind::ShapeMismatch,
                std::string(op) + ": vector dim " + std::to_string(dim) +
                    " vs tensor dim " + std::to_string(t.dim()));
}

}  // namespace

SymTensor::SymTensor(std::size_t dim, std::size_t order)
    : dim_(dim), order_(order) {
  const std::size_t count = checked_entry_count(dim, order);
  values_.assign(count, 0.0);
  weights_ = weight_table(dim, order);
}

SymTensor SymTensor::scalar(double value) {
  SymTensor t(1, 0);
  t.values_[0] = value;
  return t;
}

double SymTensor::at(const std::vector<int>& alpha) const {
  return values_[multiindex_rank(alpha)];
}

void SymTensor::set(const std::vector<int>& alpha, double v) {
  values_[multiindex_rank(alpha)] = v;
}

double inner(const SymTensor& a, const SymTensor& b) {
  require_same_shape(a, b, "inner");
  const auto& w = a.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

double norm2(const SymTensor& t) {
  double s = inner(t, t);
  return s > 0 ? std::sqrt(s) : 0.0;
}

SymTensor power(std::span<const double> v, std::size_t m) {
  SymTensor t(v.size(), m);
  std::vector<int> alpha;
  multiindex_first(v.size(), m, alpha);
  std::size_t idx = 0;
  do {
    double p = 1.0;
    for (std::size_t j = 0; j < v.size(); ++j)
      for (int q = 0; q < alpha[j]; ++q) p *= v[j];
    t[idx++] = p;
  } while (multiindex_next(alpha));
  return t;
}

SymTensor contract(const SymTensor& t, std::span<const double> v) {
  if (t.order() == 0)
    throw Error(ErrorKind::InvalidArgument, "contract: order-0 tensor");
  require_dim(t, v.size(), "contract");
  const std::size_t n = t.dim();
  SymTensor s(n, t.order() - 1);
  std::vector<int> beta;
  multiindex_first(n, t.order() - 1, beta);
  std::size_t idx = 0;
  std::vector<int> gamma(n);
  do {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] == 0.0) continue;
      gamma = beta;
      ++gamma[j];
      acc += v[j] * t.at(gamma);
    }
    s[idx++] = acc;
  } while (multiindex_next(beta));
  return s;
}

std::vector<double> gram_matrix(const SymTensor& t) {
  if (t.order() == 0)
    throw Error(ErrorKind::InvalidArgument, "gram_matrix: order-0 tensor");
  const std::size_t n = t.dim();
  const std::size_t m = t.order();
  std::vector<double> a(n * n, 0.0);
  // A[p][q] = sum_beta w(beta) T_{beta+e_p} T_{beta+e_q}; one pass over the
  // order-(m-1) index set instead of n explicit contractions.
  std::vector<int> beta;
  multiindex_first(n, m - 1, beta);
  const auto wtab = weight_table(n, m - 1);
  std::size_t bidx = 0;
  std::vector<int> gamma(n);
  std::vector<double> lifted(n);
  do {
    const double w = (*wtab)[bidx++];
    for (std::size_t j = 0; j < n; ++j) {
      gamma = beta;
      ++gamma[j];
      lifted[j] = t.at(gamma);
    }
    for (std::size_t p = 0; p < n; ++p) {
      const double wp = w * lifted[p];
      for (std::size_t q = p; q < n; ++q) a[p * n + q] += wp * lifted[q];
    }
  } while (multiindex_next(beta));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < p; ++q) a[p * n + q] = a[q * n + p];
  return a;
}

SymTensor symmetrize_product(const SymTensor& a, const SymTensor& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorKind::ShapeMismatch, "symmetrize_product: dim mismatch");
  const std::size_t n = a.dim();
  SymTensor out(n, a.order() + b.order());
  const auto& wa = a.weights();
  const auto& wb = b.weights();
  const auto& wg = out.weights();

  std::vector<int> alpha, beta;
  std::vector<int> gamma(n);
  multiindex_first(n, a.order(), alpha);
  std::size_t ia = 0;
  do {
    const double va = a[ia];
    if (va != 0.0) {
      multiindex_first(n, b.order(), beta);
      std::size_t ib = 0;
      do {
        const double vb = b[ib];
        if (vb != 0.0) {
          for (std::size_t j = 0; j < n; ++j) gamma[j] = alpha[j] + beta[j];
          const std::size_t ig = multiindex_rank(gamma);
          out[ig] += wa[ia] * wb[ib] / wg[ig] * va * vb;
        }
        ++ib;
      } while (multiindex_next(beta));
    }
    ++ia;
  } while (multiindex_next(alpha));
  return out;
}

SymTensor add(const SymTensor& a, const SymTensor& b) {
  require_same_shape(a, b, "add");
  SymTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

SymTensor scale(const SymTensor& t, double s) {
  SymTensor out = t;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return out;
}

void axpy(SymTensor& a, double s, const SymTensor& b) {
  require_same_shape(a, b, "axpy");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

void write_symtensor(std::ostream& os, const SymTensor& t) {
  write_u64_le(os, t.order());
  write_u64_le(os, t.dim());
  for (std::size_t i = 0; i < t.size(); ++i) write_f64_le(os, t[i]);
}

SymTensor read_symtensor(std::istream& is) {
  const std::uint64_t order = read_u64_le(is);
  const std::uint64_t dim = read_u64_le(is);
  if (!is) throw Error(ErrorKind::Parse, "symtensor: truncated header");
  if (dim == 0)
    throw Error(ErrorKind::Parse, "symtensor: dim 0 in header");
  SymTensor t(static_cast<std::size_t>(dim), static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = read_f64_le(is);
  if (!is) throw Error(ErrorKind::Parse, "symtensor: truncated entries");
  return t;
}

}  // namespace mspec
