#include "mspec/multiindex.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>

#include "mspec/error.hpp"

namespace mspec {

namespace {

std::atomic<std::size_t> g_entry_budget{std::size_t{1} << 28};

constexpr std::uint64_t kOverflowGuard = std::uint64_t{1} << 62;

}  // namespace

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n-k+i) / i is integral at every step
    std::uint64_t num = n - k + i;
    std::uint64_t g = r % i ? 1 : i;  // cheap partial reduction
    if (g == i) r /= i;
    if (r > kOverflowGuard / num)
      throw Error(ErrorKind::Overflow, "binomial coefficient exceeds 64-bit range");
    r *= num;
    if (g == 1) r /= i;
  }
  return r;
}

double binomial_dbl(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

std::uint64_t multiset_count(std::size_t dim, std::size_t order) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "tensor dim must be >= 1");
  return binomial_u64(dim + order - 1, order);
}

void multiindex_first(std::size_t dim, std::size_t order, std::vector<int>& alpha) {
  alpha.assign(dim, 0);
  alpha[0] = static_cast<int>(order);
}

bool multiindex_next(std::vector<int>& alpha) {
  const std::size_t n = alpha.size();
  std::size_t i = 0;
  while (i < n && alpha[i] == 0) ++i;
  if (i + 1 >= n) return false;  // (0,...,0,m) is last
  int carry = alpha[i] - 1;
  alpha[i] = 0;
  ++alpha[i + 1];
  alpha[0] = carry;
  return true;
}

std::size_t multiindex_rank(const std::vector<int>& alpha) {
  const std::size_t n = alpha.size();
  // Count predecessors: alpha' < alpha iff at the last differing index j,
  // alpha'_j < alpha_j.  With the tail fixed above j, the remaining sum is
  // free over the first j coordinates.
  std::size_t rank = 0;
  int tail = 0;
  int m = 0;
  for (std::size_t j = 0; j < n; ++j) m += alpha[j];
  for (std::size_t j = n; j-- > 1;) {
    int avail = m - tail;  // sum over coordinates 0..j given fixed tail
    for (int t = 0; t < alpha[j]; ++t) {
      // alpha'_j = t, coordinates 0..j-1 sum to avail - t
      rank += static_cast<std::size_t>(binomial_u64(avail - t + j - 1, j - 1));
    }
    tail += alpha[j];
  }
  return rank;
}

double multinomial_weight(const std::vector<int>& alpha) {
  int m = 0;
  for (int a : alpha) m += a;
  // exact integer fast path: product of binomials C(s, a) over running sums
  std::uint64_t w = 1;
  bool exact = true;
  int s = 0;
  for (int a : alpha) {
    s += a;
    if (!exact) continue;
    std::uint64_t c;
    try {
      c = binomial_u64(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(a));
    } catch (const Error&) {
      exact = false;
      continue;
    }
    if (c != 0 && w > (std::uint64_t{1} << 62) / c) {
      exact = false;
      continue;
    }
    w *= c;
  }
  if (exact) return static_cast<double>(w);
  double lg = std::lgamma(static_cast<double>(m) + 1);
  for (int a : alpha) lg -= std::lgamma(static_cast<double>(a) + 1);
  return std::exp(lg);
}

std::shared_ptr<const std::vector<double>> weight_table(std::size_t dim,
                                                        std::size_t order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>,
                  std::shared_ptr<const std::vector<double>>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::size_t count = checked_entry_count(dim, order);
  auto table = std::make_shared<std::vector<double>>();
  table->reserve(count);
  std::vector<int> alpha;
  multiindex_first(dim, order, alpha);
  do {
    table->push_back(multinomial_weight(alpha));
  } while (multiindex_next(alpha));
  cache.emplace(key, table);
  return table;
}

std::size_t entry_budget() { return g_entry_budget.load(); }

void set_entry_budget(std::size_t entries) { g_entry_budget.store(entries); }

std::size_t checked_entry_count(std::size_t dim, std::size_t order) {
  std::uint64_t count;
  try {
    count = multiset_count(dim, order);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Overflow)
      throw Error(ErrorKind::MemoryBudget,
                  "tensor shape (dim=" + std::to_string(dim) +
                      ", order=" + std::to_string(order) +
                      ") overflows the entry counter");
    throw;
  }
  if (count > entry_budget())
    throw Error(ErrorKind::MemoryBudget,
                "tensor shape (dim=" + std::to_string(dim) +
                    ", order=" + std::to_string(order) + ") needs " +
                    std::to_string(count) + " entries, budget is " +
                    std::to_string(entry_budget()));
  return static_cast<std::size_t>(count);
}

}  // namespace mspec
