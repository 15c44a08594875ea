#include "mspec/moments.hpp"

#include <cmath>

#include "mspec/error.hpp"
#include "mspec/hermite.hpp"
#include "mspec/threading.hpp"

namespace mspec {

namespace {

// Accumulates y * prod_j h_{alpha_j}(z_j) over the colex multi-index set of
// one order into *out sequentially.  h[j] holds h_0..h_{m_max}(z_j).  The
// per-entry 1/sqrt(w(alpha)) normalization is applied once after summation,
// not per sample.
void accumulate_order(const std::vector<const double*>& h, std::size_t j, int rem,
                      double prod, double*& out) {
  if (j == 1) {
    const double* h1 = h[1];
    const double* h0 = h[0];
    for (int t = 0; t <= rem; ++t) out[t] += prod * h1[t] * h0[rem - t];
    out += rem + 1;
    return;
  }
  const double* hj = h[j];
  for (int t = 0; t <= rem; ++t)
    accumulate_order(h, j - 1, rem - t, prod * hj[t], out);
}

struct RangeLayout {
  std::size_t m_lo = 0, m_hi = 0, dim = 0;
  std::vector<std::size_t> offsets;  // per order, plus total at the end
  std::size_t total = 0;
};

RangeLayout make_layout(std::size_t dim, std::size_t m_lo, std::size_t m_hi) {
  RangeLayout lay;
  lay.m_lo = m_lo;
  lay.m_hi = m_hi;
  lay.dim = dim;
  std::size_t off = 0;
  for (std::size_t m = m_lo; m <= m_hi; ++m) {
    lay.offsets.push_back(off);
    off += checked_entry_count(dim, m);
  }
  lay.offsets.push_back(off);
  lay.total = off;
  return lay;
}

}  // namespace

std::vector<SymTensor> estimate_moment_range(const SampleSource& samples,
                                             std::size_t m_lo, std::size_t m_hi,
                                             const std::optional<Matrix>& subspace_basis,
                                             int threads) {
  if (samples.n == 0)
    throw Error(ErrorKind::InvalidArgument, "estimate_moment: empty sample set");
  if (m_hi < m_lo)
    throw Error(ErrorKind::InvalidArgument, "estimate_moment: m_hi < m_lo");
  const std::size_t d = samples.dim;
  std::size_t n_coords = d;
  if (subspace_basis) {
    if (subspace_basis->rows != d)
      throw Error(ErrorKind::ShapeMismatch,
                  "estimate_moment: basis rows do not match sample dim");
    n_coords = subspace_basis->cols;
  }
  const RangeLayout lay = make_layout(n_coords, m_lo, m_hi);

  const std::vector<double> sums = fixed_tree_sum(
      samples.n, lay.total, threads,
      [&](std::size_t first, std::size_t last, double* acc) {
        const std::size_t count = last - first;
        std::vector<double> xbuf(count * d), ybuf(count);
        samples.fetch(first, count, xbuf.data(), ybuf.data());
        std::vector<double> z(n_coords);
        std::vector<double> hvals(n_coords * (m_hi + 1));
        std::vector<const double*> h(n_coords);
        for (std::size_t j = 0; j < n_coords; ++j)
          h[j] = hvals.data() + j * (m_hi + 1);
        for (std::size_t i = 0; i < count; ++i) {
          const double* x = xbuf.data() + i * d;
          const double y = ybuf[i];
          if (y == 0.0) continue;
          if (subspace_basis) {
            const Matrix& b = *subspace_basis;
            for (std::size_t c = 0; c < n_coords; ++c) {
              double s = 0.0;
              for (std::size_t r = 0; r < d; ++r) s += b(r, c) * x[r];
              z[c] = s;
            }
          } else {
            std::copy(x, x + d, z.begin());
          }
          for (std::size_t j = 0; j < n_coords; ++j)
            hermite_all_into(m_hi, z[j], hvals.data() + j * (m_hi + 1));
          for (std::size_t m = m_lo; m <= m_hi; ++m) {
            double* out = acc + lay.offsets[m - m_lo];
            if (n_coords == 1) {
              *out += y * h[0][m];
            } else {
              accumulate_order(h, n_coords - 1, static_cast<int>(m), y, out);
            }
          }
        }
      });

  std::vector<SymTensor> result;
  result.reserve(m_hi - m_lo + 1);
  const double inv_n = 1.0 / static_cast<double>(samples.n);
  for (std::size_t m = m_lo; m <= m_hi; ++m) {
    SymTensor t(n_coords, m);
    const double* src = sums.data() + lay.offsets[m - m_lo];
    const auto& w = t.weights();
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = src[i] * inv_n / std::sqrt(w[i]);
    result.push_back(std::move(t));
  }
  return result;
}

MomentEstimate estimate_moment(const SampleSource& samples, std::size_t m,
                               const std::optional<Matrix>& subspace_basis,
                               int threads, double target_error, double confidence) {
  auto v = estimate_moment_range(samples, m, m, subspace_basis, threads);
  MomentEstimate est;
  est.tensor = std::move(v[0]);
  est.order = m;
  est.num_samples = samples.n;
  est.target_error = target_error;
  est.confidence = confidence;
  return est;
}

std::uint64_t sample_size(std::size_t m, std::size_t d_eff, double target_error,
                          double tau, double y_moment_bound) {
  if (d_eff == 0 || target_error <= 0 || tau <= 0 || y_moment_bound <= 0)
    throw Error(ErrorKind::InvalidArgument, "sample_size: all inputs must be positive");
  const double t = m > 0 ? static_cast<double>(m) : 1.0;
  const double n = binomial_dbl(static_cast<double>(d_eff + m), static_cast<double>(m)) *
                   std::exp(static_cast<double>(m) / t) * y_moment_bound * y_moment_bound /
                   (tau * tau * target_error * target_error);
  if (!std::isfinite(n) || n > 4.6e18)
    throw Error(ErrorKind::Overflow,
                "sample_size overflows; use a smaller m or d_eff");
  return static_cast<std::uint64_t>(std::ceil(n));
}

SymTensor analytic_moment(const ReluNetwork& net, std::size_t m) {
  const double cm = relu_coeff(m);
  SymTensor t(net.dim, m);
  if (cm == 0.0) return t;
  for (std::size_t i = 0; i < net.width; ++i)
    if (net.weights[i] != 0.0) axpy(t, cm * net.weights[i], power(net.dirs[i], m));
  return t;
}

}  // namespace mspec
