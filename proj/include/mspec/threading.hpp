#ifndef MSPEC_THREADING_HPP
#define MSPEC_THREADING_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace mspec {

/// Resolves a thread-count request: 0 means "use MOMENT_SPECTRA_THREADS if
/// set, else 1".  Always at least 1.
int resolve_threads(int requested);

/// Runs fn(index) for index in [0, n) across the given number of worker
/// threads.  Work items must be independent; assignment order is unspecified.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Deterministic sum over items [0, n) of vector-valued contributions.
///
/// accumulate(first, last, acc) must add items [first, last) into acc (width
/// doubles, pre-zeroed).  Items are grouped into fixed leaves of 4096 and at
/// most 64 groups; leaves are combined pairwise inside each group and groups
/// are combined pairwise at the end.  The reduction tree depends only on n,
/// so the result is bitwise identical for every thread count.
std::vector<double> fixed_tree_sum(
    std::size_t n, std::size_t width, int threads,
    const std::function<void(std::size_t, std::size_t, double*)>& accumulate);

}  // namespace mspec

#endif
