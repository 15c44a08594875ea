#ifndef MSPEC_SCHUR_HPP
#define MSPEC_SCHUR_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mspec/symtensor.hpp"

namespace mspec {

/// Partition lambda_1 >= lambda_2 >= ... >= 0; trailing zeros are stripped
/// on construction.  Throws InvalidArgument on negative or increasing parts.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  std::size_t num_parts() const { return parts_.size(); }
  int size() const { return size_; }             // |lambda|
  int part(std::size_t i) const {                // zero-padded access
    return i < parts_.size() ? parts_[i] : 0;
  }
  std::string to_string() const;

 private:
  std::vector<int> parts_;
  int size_ = 0;
};

/// Polynomial with exact integer coefficients, keyed by exponent vectors.
/// Schur operations produce symmetric, homogeneous instances.
class SymmetricPolynomial {
 public:
  using Monomials = std::map<std::vector<int>, mpz_class>;

  SymmetricPolynomial() = default;
  explicit SymmetricPolynomial(std::size_t num_vars) : num_vars_(num_vars) {}

  std::size_t num_vars() const { return num_vars_; }
  const Monomials& monomials() const { return mono_; }
  bool is_zero() const { return mono_.empty(); }

  void add_term(const std::vector<int>& exponents, const mpz_class& coeff);
  double evaluate(std::span<const double> x) const;

  /// Sum of coefficient values at x = (1,...,1).
  mpz_class value_at_ones() const;

  SymmetricPolynomial operator+(const SymmetricPolynomial& o) const;
  SymmetricPolynomial operator-(const SymmetricPolynomial& o) const;
  SymmetricPolynomial operator*(const SymmetricPolynomial& o) const;

 private:
  std::size_t num_vars_ = 0;
  Monomials mono_;
};

/// Complete homogeneous symmetric polynomial of degree k in n variables
/// (all degree-k monomials with coefficient 1); degree 0 is the constant 1,
/// negative degree is the zero polynomial.
SymmetricPolynomial complete_homogeneous(int degree, std::size_t n_vars);

/// s_lambda as an explicit polynomial via the Jacobi-Trudi determinant
/// det([y_{lambda_i + j - i}]).  Exact integer coefficients.
SymmetricPolynomial jacobi_trudi(const Partition& lambda, std::size_t n_vars);

/// Bialternant evaluation det([x_i^{lambda_j + n - j}]) / det([x_i^{n-j}]).
/// Nearly-equal entries fall back to evaluating the Jacobi-Trudi polynomial.
double schur_bialternant(const Partition& lambda, std::span<const double> x);

/// Tensor-valued Schur polynomial: each monomial c prod_i x_i^{a_i} of
/// s_lambda becomes c * Sym((x)_i v_i^{(x) a_i}); order |lambda|.
SymTensor tensor_schur(const Partition& lambda,
                       const std::vector<std::vector<double>>& vs);

/// Coefficients (c_0..c_{k-1}) with X_t = sum_a c_a X_a for the power
/// vectors X_s = (x_1^s..x_k^s); solved from the Vandermonde system.
/// Throws Singular when the condition estimate exceeds 1e12.
std::vector<double> cramer_coefficients(std::size_t k, std::size_t t,
                                        std::span<const double> xs);

struct VerifyReport {
  std::string suite;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // worst observed lhs / allowance
  bool pass = false;
  std::string detail;
};

/// |M_t| <= binom(t,k-1) (2k)^k max_{s<k} |M_s| over random scalar trials.
VerifyReport verify_scalar_bound(std::size_t k, std::size_t t, std::size_t trials,
                                 std::uint64_t rng_seed);

/// Residual of the tensor recursion
/// M_t = Sym(sum_a (-1)^{k+a+1} M_a (x) s_{(t-k+1,1^{k-1-a})}(v)) over random
/// trials; pass iff residual <= 1e-8 * (1 + |M_t|) always.
VerifyReport verify_tensor_recursion(std::size_t k, std::size_t t, std::size_t dim,
                                     std::size_t trials, std::uint64_t rng_seed);

/// |M_t| <= binom(t,k-1) (2k)^k max_{even s<2k} |M_s| for even t >= 2k,
/// via the v_i^{(x)2} embedding (norms computed from pairwise dots).
VerifyReport verify_even_bound(std::size_t k, std::size_t t_even, std::size_t dim,
                               std::size_t trials, std::uint64_t rng_seed);

}  // namespace mspec

#endif
