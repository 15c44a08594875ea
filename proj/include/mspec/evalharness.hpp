#ifndef MSPEC_EVALHARNESS_HPP
#define MSPEC_EVALHARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mspec/datagen.hpp"
#include "mspec/learner.hpp"

namespace mspec {

struct McError {
  double error = 0.0;     // sqrt(mean squared difference)
  double se = 0.0;        // jackknife SE of the sqrt
  double mean_sq = 0.0;   // mean squared difference
  double se_sq = 0.0;     // SE of the mean of squares
  std::size_t n = 0;
};

/// Monte Carlo L2 error over n_eval fresh Gaussian points (counter-based
/// stream kEval under the given seed; keep it disjoint from training seeds).
McError l2_error_mc(const ReluNetwork& net, const Hypothesis& h, std::size_t n_eval,
                    std::uint64_t seed, int threads = 1);

struct AnalyticError {
  double total = 0.0;                    // sqrt of the full decomposition
  std::vector<double> per_order_errors;  // |lift(P_m) - M_m|, m = 0..D
  double tail_exact = 0.0;               // sum_{D<m<=M_max} |M_m|^2
  double tail_bound = 0.0;               // continuation beyond M_max
  std::size_t m_max = 0;
};

/// Exact decomposition |F~ - F|^2 = sum_m |lift(P_m) - M_m|^2 + tail via the
/// orthonormal Hermite expansion; the tail beyond m_max continues the exact
/// c_m^2 (sum|w|)^2 sum until c_m^2 < 1e-16.
AnalyticError l2_error_analytic(const ReluNetwork& net, const Hypothesis& h,
                                std::size_t m_max = 400);

/// Hypothesis built from exact analytic moments: basis from the analytic
/// quadratic form, P_m the projections of M_m onto it.
Hypothesis make_analytic_hypothesis(const ReluNetwork& net, const LearnConfig& config);

/// Largest principal angle (radians) between span(basis) and span of the
/// network directions.
double principal_angle(const Matrix& basis, const ReluNetwork& net);

struct EvalReport {
  McError mc;
  std::optional<AnalyticError> analytic;
  double runtime_seconds = 0.0;
  nlohmann::json to_json(bool include_timing) const;
};

struct InstanceSpec {
  std::size_t d = 4;
  std::size_t k = 1;
  WeightProfile profile = WeightProfile::Generic;
  double theta = 0.01;
  std::uint64_t seed = 0;
  std::string model_file;  // non-empty: load instead of generating
};

struct ExperimentResult {
  ReluNetwork net;
  LearnResult learned;
  EvalReport report;
  nlohmann::json manifest;
};

/// Generate (or load) an instance, sample, learn, evaluate; write model,
/// hypothesis, manifest and report under out_dir when non-empty.  Fully
/// reproducible from (config, instance seed); wall time goes into the files
/// only when include_timing is set.
ExperimentResult run_experiment(const LearnConfig& config, const InstanceSpec& instance,
                                const std::string& out_dir, std::size_t n_eval = 100'000,
                                bool analytic = false, bool include_timing = false);

}  // namespace mspec

#endif
