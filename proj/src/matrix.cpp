#include "mspec/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mspec/error.hpp"

namespace mspec {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> matvec_t(const Matrix& m, std::span<const double> x) {
  std::vector<double> y(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += m(i, j) * x[i];
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw Error(ErrorKind::ShapeMismatch, "matmul: inner dims differ");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

EigResult jacobi_eigh(const Matrix& a, double tie_tol) {
  if (a.rows != a.cols)
    throw Error(ErrorKind::InvalidArgument, "jacobi_eigh: non-square input");
  const std::size_t n = a.rows;
  double scale = 0.0;
  for (double v : a.a) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-10 * std::max(1.0, scale))
        throw Error(ErrorKind::InvalidArgument, "jacobi_eigh: input not symmetric");

  Matrix w = a;
  // symmetrize exactly so both triangles agree during sweeps
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (w(i, j) + w(j, i));
      w(i, j) = w(j, i) = m;
    }
  Matrix v = Matrix::identity(n);

  auto offdiag = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += w(i, j) * w(i, j);
    return s;
  };

  const double stop = 1e-28 * std::max(1.0, scale) * std::max(1.0, scale);
  for (int sweep = 0; sweep < 64 && offdiag() > stop; ++sweep) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double app = w(p, p), aqq = w(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double wip = w(i, p), wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double wpj = w(p, j), wqj = w(q, j);
          w(p, j) = c * wpj - s * wqj;
          w(q, j) = s * wpj + c * wqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
  }

  // stable non-increasing order; near-ties keep index order
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return w(i, i) > w(j, j) + tie_tol;
  });

  EigResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.eigenvalues[col] = w(src, src);
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(v(i, src)) > 1e-12) {
        sign = v(i, src) > 0 ? 1.0 : -1.0;
        break;
      }
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, col) = sign * v(i, src);
  }
  return out;
}

LuResult lu_factor(const Matrix& a) {
  if (a.rows != a.cols)
    throw Error(ErrorKind::InvalidArgument, "lu_factor: non-square input");
  const std::size_t n = a.rows;
  LuResult f;
  f.lu = a;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(f.lu(i, k)) > best) {
        best = std::fabs(f.lu(i, k));
        piv = i;
      }
    if (best == 0.0) {
      f.singular = true;
      return f;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      f.lu(i, k) /= f.lu(k, k);
      const double lik = f.lu(i, k);
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= lik * f.lu(k, j);
    }
  }
  return f;
}

double lu_det(const LuResult& f) {
  if (f.singular) return 0.0;
  double d = f.sign;
  for (std::size_t i = 0; i < f.lu.rows; ++i) d *= f.lu(i, i);
  return d;
}

std::vector<double> lu_solve(const LuResult& f, std::span<const double> rhs) {
  if (f.singular) throw Error(ErrorKind::Singular, "lu_solve: singular matrix");
  const std::size_t n = f.lu.rows;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

double condition_inf(const Matrix& a) {
  const std::size_t n = a.rows;
  LuResult f = lu_factor(a);
  if (f.singular) return std::numeric_limits<double>::infinity();
  double norm_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::fabs(a(i, j));
    norm_a = std::max(norm_a, r);
  }
  double norm_inv = 0.0;
  std::vector<double> e(n, 0.0), row_abs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    auto col = lu_solve(f, e);
    for (std::size_t i = 0; i < n; ++i) row_abs[i] += std::fabs(col[i]);
  }
  for (std::size_t i = 0; i < n; ++i) norm_inv = std::max(norm_inv, row_abs[i]);
  return norm_a * norm_inv;
}

Matrix orthonormalize(const Matrix& columns, double drop_tol) {
  const std::size_t n = columns.rows;
  std::vector<std::vector<double>> basis;
  for (std::size_t c = 0; c < columns.cols; ++c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = columns(i, c);
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += b[i] * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= d * b[i];
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > drop_tol) {
      for (double& x : v) x /= nrm;
      basis.push_back(std::move(v));
    }
  }
  Matrix out(n, basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) out(i, c) = basis[c][i];
  return out;
}

}  // namespace mspec
