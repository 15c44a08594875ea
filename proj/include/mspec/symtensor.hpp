#ifndef MSPEC_SYMTENSOR_HPP
#define MSPEC_SYMTENSOR_HPP

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mspec/multiindex.hpp"

namespace mspec {

/// Symmetric order-m tensor over R^n in multiset-compressed form: one stored
/// value per multiplicity vector alpha (colex order), with the multinomial
/// weight m!/prod(alpha_j!) restoring dense inner products.  An order-0
/// tensor is a single scalar.  Immutable entries are not enforced by type,
/// but every library operation treats inputs as const.
class SymTensor {
 public:
  SymTensor() = default;

  /// Zero tensor of the given shape.  Throws MemoryBudget past the global
  /// entry budget.
  SymTensor(std::size_t dim, std::size_t order);

  static SymTensor scalar(double value);

  std::size_t dim() const { return dim_; }
  std::size_t order() const { return order_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Multinomial weights, colex order, shared across equal shapes.
  const std::vector<double>& weights() const { return *weights_; }

  double at(const std::vector<int>& alpha) const;
  void set(const std::vector<int>& alpha, double v);

 private:
  std::size_t dim_ = 1;
  std::size_t order_ = 0;
  std::vector<double> values_{0.0};
  std::shared_ptr<const std::vector<double>> weights_ = weight_table(1, 0);
};

/// Weighted inner product; equals the dense Frobenius inner product.
double inner(const SymTensor& a, const SymTensor& b);

double norm2(const SymTensor& t);

/// m-th tensor power of v: entry at alpha is prod_j v_j^alpha_j.
SymTensor power(std::span<const double> v, std::size_t m);

/// Contraction along one mode: S_beta = sum_j v_j T_{beta+e_j}.
SymTensor contract(const SymTensor& t, std::span<const double> v);

/// Matrix A with A[a][b] = <T e_a, T e_b>, so v'Av = |contract(T,v)|^2.
/// Returned row-major, dim x dim.
std::vector<double> gram_matrix(const SymTensor& t);

/// Sym(A (x) B): entry at gamma is
/// sum_{alpha+beta=gamma} w(alpha)w(beta)/w(gamma) A_alpha B_beta.
SymTensor symmetrize_product(const SymTensor& a, const SymTensor& b);

SymTensor add(const SymTensor& a, const SymTensor& b);
SymTensor scale(const SymTensor& t, double s);
/// a += s*b in place (shape-checked).
void axpy(SymTensor& a, double s, const SymTensor& b);

// Binary serialization: u64 LE order, u64 LE dim, then entries as f64 LE in
// colex multi-index order.
void write_symtensor(std::ostream& os, const SymTensor& t);
SymTensor read_symtensor(std::istream& is);

}  // namespace mspec

#endif
