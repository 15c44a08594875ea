#ifndef MSPEC_LEARNER_HPP
#define MSPEC_LEARNER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mspec/datagen.hpp"
#include "mspec/matrix.hpp"
#include "mspec/moments.hpp"
#include "mspec/symtensor.hpp"

namespace mspec {

/// Every knob of the learning pipeline.  Zero values for moment_cutoff /
/// degree_D select the defaults 4k and ceil(c_degree * epsilon^{-4/3}).
struct LearnConfig {
  std::size_t k = 1;
  std::size_t d = 0;
  double epsilon = 0.1;
  std::size_t moment_cutoff = 0;
  std::size_t degree_D = 0;
  double c_degree = 2.0;
  std::size_t n_subspace = 1'000'000;
  std::size_t n_regression = 1'000'000;
  double sample_multiplier = 1.0;
  std::uint64_t seed = 0;
  double eigen_tie_tol = 1e-10;
  double degeneracy_threshold = 1e-12;
  double noise_sigma = 0.0;
  int threads = 1;

  void validate() const;  // throws InvalidArgument
  std::size_t effective_cutoff() const;
  /// Degree after the epsilon rule and the entry-budget cap; sets *capped
  /// when the cap bites.
  std::size_t effective_degree(bool* capped = nullptr) const;
  std::size_t effective_n_subspace() const;
  std::size_t effective_n_regression() const;
};

/// Learned model: orthonormal basis B of the recovered subspace and Hermite
/// coefficient tensors P_0..P_D over R^k.
struct Hypothesis {
  Matrix basis;                   // d x k, orthonormal columns
  std::vector<SymTensor> coeffs;  // P_m, order m, dim k
  std::size_t degree = 0;
  bool degenerate_subspace = false;
};

/// A = sum_m gram(T_m), so v'Av = sum_m |T_m v|^2 = Q(v).
Matrix build_quadratic_form(std::span<const SymTensor> tensors);

struct SubspaceResult {
  Matrix basis;                    // d x k
  std::vector<double> eigenvalues; // all d, non-increasing
};

/// Top-k eigenspace of a symmetric matrix; see jacobi_eigh for the
/// determinism conventions.
SubspaceResult top_k_subspace(const Matrix& a, std::size_t k, double tie_tol = 1e-10);

struct LearnResult {
  Hypothesis hypothesis;
  std::vector<double> eigenvalues;
  std::size_t moment_cutoff = 0;
  bool degree_capped = false;
  std::size_t n_subspace_used = 0;
  std::size_t n_regression_used = 0;
  std::vector<std::string> warnings;
};

/// The full pipeline: estimate T_1..T_{4k} from the first sample set, take
/// the top-k eigenspace of Q, regress P_0..P_D inside it on the second
/// (disjoint) sample set.  A fully degenerate spectrum (all eigenvalues
/// below the threshold) is a warning, not an error: the basis falls back to
/// the first k coordinate directions.
LearnResult learn(const SampleSource& samples_subspace,
                  const SampleSource& samples_regression, const LearnConfig& config);

double predict(const Hypothesis& h, std::span<const double> x);

/// Batch evaluation with shared workspaces; bitwise equal to predict per row.
std::vector<double> predict_batch(const Hypothesis& h, const double* xs,
                                  std::size_t n, int threads = 1);

struct ResidualDiagnostics {
  // index m in [0, m_max]
  std::vector<double> max_orthogonal_contraction;  // max_u |M_m u|, u in span(B,v)\span(B)
  std::vector<double> projection_gap;              // |R_m - M_m|
};

/// Analytic diagnostics of how much moment mass the basis misses.
ResidualDiagnostics residual_orthogonal_mass(const ReluNetwork& net, const Matrix& basis,
                                             std::size_t m_max);

// Hypothesis file: 8-byte magic "MSPECHYP", u64 LE JSON header length, JSON
// header {dim, k, degree, basis row-major}, then degree+1 SymTensor blocks.
void write_hypothesis_file(const std::string& path, const Hypothesis& h);
Hypothesis read_hypothesis_file(const std::string& path);

}  // namespace mspec

#endif
