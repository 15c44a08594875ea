#ifndef MSPEC_HERMITE_HPP
#define MSPEC_HERMITE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "mspec/symtensor.hpp"

namespace mspec {

// Normalized probabilist's Hermite polynomials h_m = He_m / sqrt(m!), their
// tensor extension H_m(x), and the ReLU expansion coefficients
// c_m = E[ReLU(G) h_m(G)] for G ~ N(0,1).

/// h_m(t) via the stable three-term recurrence
/// h_{m+1}(t) = (t h_m(t) - sqrt(m) h_{m-1}(t)) / sqrt(m+1).
double hermite_eval(std::size_t m, double t);

/// All of h_0(t) .. h_{m_max}(t) in one recurrence pass.
std::vector<double> hermite_all(std::size_t m_max, double t);

/// In-place variant: out must hold m_max+1 slots.
void hermite_all_into(std::size_t m_max, double t, double* out);

/// c_m: 1/sqrt(2*pi) for m = 0, 1/2 for m = 1, 0 for odd m > 1, and
/// h_{m-2}(0)/(sqrt(2*pi) * sqrt(m(m-1))) for even m >= 2.
double relu_coeff(std::size_t m);

/// c_0 .. c_{m_max} with the recurrence at t = 0 shared across orders.
std::vector<double> relu_coeff_all(std::size_t m_max);

/// Order-m Hermite tensor over R^n; compressed entry at alpha is
/// prod_j He_{alpha_j}(x_j) / sqrt(m!).  Throws MemoryBudget when
/// C(n+m-1, m) exceeds the global entry budget.
SymTensor hermite_tensor(std::size_t m, std::span<const double> x);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule in the probabilist normalization:
/// E[f(G)] ~= sum_i w_i f(t_i), weights summing to 1.
const QuadratureRule& gauss_hermite(std::size_t n);

/// Gauss-Laguerre rule for integral_0^inf f(u) e^-u du ~= sum_i w_i f(u_i).
const QuadratureRule& gauss_laguerre(std::size_t n);

/// n-node quadrature of E[ReLU(G) h_m(G)], the validation oracle for
/// relu_coeff.  Even m uses the substitution u = t^2/2, which turns the
/// half-line integral into a Gauss-Laguerre sum with polynomial integrand;
/// odd m uses the symmetric Gauss-Hermite rule directly (the kinked part of
/// the integrand is odd and cancels exactly across paired nodes).  Both
/// routes are exact up to rounding for this integrand family.
double relu_coeff_quadrature(std::size_t m, std::size_t n_nodes);

}  // namespace mspec

#endif
