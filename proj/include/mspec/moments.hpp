#ifndef MSPEC_MOMENTS_HPP
#define MSPEC_MOMENTS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mspec/datagen.hpp"
#include "mspec/matrix.hpp"
#include "mspec/symtensor.hpp"

namespace mspec {

struct MomentEstimate {
  SymTensor tensor;
  std::size_t order = 0;
  std::size_t num_samples = 0;
  double target_error = 0.0;  // requested delta (informational)
  double confidence = 0.0;    // requested 1 - tau (informational)
};

/// Empirical (1/N) sum_i y_i H_m(z_i) with z = B^T x when a basis is given
/// (columns orthonormal), z = x otherwise.  Fixed-tree pairwise summation:
/// bitwise identical for any thread count.  Throws InvalidArgument on an
/// empty sample set.
MomentEstimate estimate_moment(const SampleSource& samples, std::size_t m,
                               const std::optional<Matrix>& subspace_basis = {},
                               int threads = 1, double target_error = 0.0,
                               double confidence = 0.0);

/// One-pass variant for orders m_lo..m_hi (shared Hermite recurrences and
/// sample stream); element [m - m_lo] is the order-m estimate.
std::vector<SymTensor> estimate_moment_range(const SampleSource& samples,
                                             std::size_t m_lo, std::size_t m_hi,
                                             const std::optional<Matrix>& subspace_basis = {},
                                             int threads = 1);

/// Sample-size heuristic N = ceil(C(d_eff+m, m) e^{m/t} y_bound^2 / (tau^2
/// delta^2)) at t = m, the moment-estimation bound with all implied
/// constants set to one.  A heuristic: callers override via config.
/// Throws Overflow when N exceeds 2^62 (suggests smaller m or d_eff).
std::uint64_t sample_size(std::size_t m, std::size_t d_eff, double target_error,
                          double tau, double y_moment_bound);

/// M_m = c_m sum_i w_i v_i^(x)m, exactly (up to rounding).
SymTensor analytic_moment(const ReluNetwork& net, std::size_t m);

}  // namespace mspec

#endif
