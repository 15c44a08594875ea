#include "mspec/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace mspec {

namespace {

constexpr std::size_t kLeaf = 4096;
constexpr std::size_t kMaxGroups = 64;

void add_into(std::vector<double>& dst, const std::vector<double>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

// Pairwise combine via a binary counter: buffers[level] holds the pending
// partial for 2^level consumed blocks.
struct PairwiseStack {
  explicit PairwiseStack(std::size_t width) : width_(width) {}

  void push(std::vector<double>&& block) {
    std::size_t level = 0;
    while (level < pending_.size() && !pending_[level].empty()) {
      add_into(block, pending_[level]);
      pending_[level].clear();
      ++level;
    }
    if (level == pending_.size()) pending_.emplace_back();
    pending_[level] = std::move(block);
  }

  std::vector<double> finish() {
    std::vector<double> total(width_, 0.0);
    for (auto& p : pending_)
      if (!p.empty()) add_into(total, p);
    return total;
  }

  std::size_t width_;
  std::vector<std::vector<double>> pending_;
};

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MOMENT_SPECTRA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nw = static_cast<int>(std::min<std::size_t>(threads, n));
  pool.reserve(nw - 1);
  for (int t = 1; t < nw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

std::vector<double> fixed_tree_sum(
    std::size_t n, std::size_t width, int threads,
    const std::function<void(std::size_t, std::size_t, double*)>& accumulate) {
  if (n == 0) return std::vector<double>(width, 0.0);
  const std::size_t n_leaves = (n + kLeaf - 1) / kLeaf;
  const std::size_t leaves_per_group =
      (n_leaves + kMaxGroups - 1) / kMaxGroups;
  const std::size_t n_groups = (n_leaves + leaves_per_group - 1) / leaves_per_group;

  std::vector<std::vector<double>> group_sums(n_groups);
  parallel_for(n_groups, threads, [&](std::size_t g) {
    PairwiseStack stack(width);
    const std::size_t leaf_lo = g * leaves_per_group;
    const std::size_t leaf_hi = std::min(n_leaves, leaf_lo + leaves_per_group);
    for (std::size_t leaf = leaf_lo; leaf < leaf_hi; ++leaf) {
      std::vector<double> block(width, 0.0);
      const std::size_t first = leaf * kLeaf;
      const std::size_t last = std::min(n, first + kLeaf);
      accumulate(first, last, block.data());
      stack.push(std::move(block));
    }
    group_sums[g] = stack.finish();
  });

  PairwiseStack top(width);
  for (auto& g : group_sums) top.push(std::move(g));
  return top.finish();
}

}  // namespace mspec
