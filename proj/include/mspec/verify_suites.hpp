#ifndef MSPEC_VERIFY_SUITES_HPP
#define MSPEC_VERIFY_SUITES_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mspec {

struct SuiteOutcome {
  std::string name;
  bool pass = false;
  std::vector<std::string> lines;  // human-readable detail
};

/// Orthonormality E[h_n h_m] = delta within 1e-9 (64-node quadrature,
/// n,m <= 12) and the contraction identity <H_m(x), v^(x)m> = h_m(v.x)
/// within 1e-9 (200 trials, m <= 8, d <= 6).
SuiteOutcome suite_hermite(std::uint64_t seed);

/// relu_coeff vs the 128-node quadrature oracle within 1e-8 for m <= 24,
/// exact zero for odd m > 1, and |c_m| m^{5/4} in [0.1, 10] for even m <= 64.
SuiteOutcome suite_relu_coefficients();

/// Bialternant vs Jacobi-Trudi within 1e-8*(1+|value|) for |lambda| <= 6,
/// n <= 4, 50 evaluations each; coefficient non-negativity and homogeneity;
/// frozen bialternant values.
SuiteOutcome suite_schur(std::uint64_t seed);

/// Tensor recursion residual <= 1e-8 (1 + |M_t|) over 100 trials per
/// (k,t,dim) in {1,2,3} x {k..8} x {2,3}.
SuiteOutcome suite_tensor_recursion(std::uint64_t seed);

/// verify_scalar_bound and verify_even_bound, 1000 trials each, k <= 3,
/// t <= 10, zero violations.
SuiteOutcome suite_moment_bounds(std::uint64_t seed);

/// All of the above in order.
std::vector<SuiteOutcome> run_all_suites(std::uint64_t seed);

}  // namespace mspec

#endif
