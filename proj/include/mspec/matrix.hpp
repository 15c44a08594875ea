#ifndef MSPEC_MATRIX_HPP
#define MSPEC_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace mspec {

/// Minimal row-major dense matrix for the small systems this project needs
/// (d and k stay desk-scale; no BLAS).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n);
};

std::vector<double> matvec(const Matrix& m, std::span<const double> x);
/// y = M^T x.
std::vector<double> matvec_t(const Matrix& m, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

struct EigResult {
  std::vector<double> eigenvalues;  // non-increasing
  Matrix eigenvectors;              // columns, matching order
};

/// Cyclic Jacobi eigensolver for symmetric matrices.  Deterministic sweep
/// order; eigenvalues sorted non-increasing with near-ties (gap < tie_tol)
/// kept in pre-sort index order; each eigenvector's first component of
/// magnitude > 1e-12 is made positive.  Throws InvalidArgument when the
/// input is not symmetric within 1e-10 * scale.
EigResult jacobi_eigh(const Matrix& a, double tie_tol = 1e-10);

struct LuResult {
  Matrix lu;                 // packed L (unit diagonal) and U
  std::vector<int> perm;     // row permutation
  int sign = 1;
  bool singular = false;
};

LuResult lu_factor(const Matrix& a);
double lu_det(const LuResult& f);
std::vector<double> lu_solve(const LuResult& f, std::span<const double> rhs);
/// Infinity-norm condition estimate via the explicit inverse (small n only).
double condition_inf(const Matrix& a);

/// Modified Gram-Schmidt; returns the orthonormal basis of the span of the
/// input columns, dropping directions with residual norm below drop_tol.
Matrix orthonormalize(const Matrix& columns, double drop_tol = 1e-10);

}  // namespace mspec

#endif
