#ifndef MSPEC_MULTIINDEX_HPP
#define MSPEC_MULTIINDEX_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace mspec {

// Multiplicity vectors alpha in N^n with sum(alpha) = m index the distinct
// entries of a symmetric order-m tensor over R^n.  Enumeration is
// colexicographic: the first coordinate varies fastest, the last slowest,
// starting at (m,0,...,0).  Serialization and all compressed storage rely on
// this order.

/// Number of multisets: C(n+m-1, m).  Throws Overflow past 2^62.
std::uint64_t multiset_count(std::size_t dim, std::size_t order);

/// Binomial coefficient with overflow detection (throws Overflow).
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

/// Binomial as double via lgamma; usable far beyond the 64-bit range.
double binomial_dbl(double n, double k);

/// First multi-index in colex order: (m, 0, ..., 0).
void multiindex_first(std::size_t dim, std::size_t order, std::vector<int>& alpha);

/// Advance alpha to its colex successor; returns false after the last one.
bool multiindex_next(std::vector<int>& alpha);

/// Rank of alpha within the colex enumeration of its (dim, order) shape.
std::size_t multiindex_rank(const std::vector<int>& alpha);

/// Multinomial weight m!/prod(alpha_j!), exact in 64-bit when it fits,
/// lgamma-based floating point beyond that.
double multinomial_weight(const std::vector<int>& alpha);

/// Shared per-shape cache of the multinomial weights in colex order.
/// Thread-safe; tensors of equal shape share one vector.
std::shared_ptr<const std::vector<double>> weight_table(std::size_t dim,
                                                        std::size_t order);

// Global compressed-entry budget guarding every tensor constructor.
std::size_t entry_budget();
void set_entry_budget(std::size_t entries);

/// Throws MemoryBudget if a (dim, order) shape exceeds the budget;
/// returns the entry count otherwise.
std::size_t checked_entry_count(std::size_t dim, std::size_t order);

}  // namespace mspec

#endif
