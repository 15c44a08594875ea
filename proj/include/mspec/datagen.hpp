#ifndef MSPEC_DATAGEN_HPP
#define MSPEC_DATAGEN_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mspec {

/// Ground-truth target F(x) = sum_i w_i ReLU(v_i . x) with unit directions
/// v_i and sum_i |w_i| <= 1.  Constructors reject violations rather than
/// normalizing.
struct ReluNetwork {
  std::size_t dim = 0;
  std::size_t width = 0;
  std::vector<double> weights;           // k
  std::vector<std::vector<double>> dirs;  // k unit vectors of length dim

  static ReluNetwork create(std::size_t dim, std::vector<double> weights,
                            std::vector<std::vector<double>> dirs);
};

double evaluate(const ReluNetwork& net, std::span<const double> x);

/// Flat sample storage: row i is x (dim doubles) followed by nothing; labels
/// live in y.  Generation is counter-based per sample index, so identical
/// (net, n, seed, stream) is bitwise reproducible at any thread count.
struct SampleSet {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> x;  // n * dim
  std::vector<double> y;  // n

  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * dim, dim};
  }
};

SampleSet sample(const ReluNetwork& net, std::size_t n, std::uint64_t seed,
                 std::uint64_t stream, double noise_sigma = 0.0,
                 int threads = 1);

/// Random-access sample stream: fetch(first, count, x, y) writes count rows
/// (count*dim doubles into x, count labels into y).  Lets estimators run
/// over generated data without materializing it.
struct SampleSource {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::function<void(std::size_t, std::size_t, double*, double*)> fetch;
};

/// View over an in-memory sample set (must outlive the source).
SampleSource make_source(const SampleSet& s);

/// Streaming counter-based generator; equivalent to sample() with the same
/// arguments, one block at a time.
SampleSource make_source(const ReluNetwork& net, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream, double noise_sigma = 0.0);

enum class WeightProfile { Generic, NearParallel, Cancelling };

WeightProfile parse_profile(const std::string& name);  // throws InvalidArgument
const char* profile_name(WeightProfile p);

/// Test-instance factory.  generic: directions uniform on the sphere,
/// positive Dirichlet-style weights with sum <= 1.  near-parallel: pairwise
/// angles at most theta, signed weights.  cancelling: signed weights with
/// sum_i w_i v_i = 0 exactly (requires k >= 2).  Unlike the plain
/// constructor this normalizes by design.
ReluNetwork random_network(std::size_t d, std::size_t k, WeightProfile profile,
                           std::uint64_t seed, double theta = 0.01);

// Model file: JSON {"dim", "width", "weights": [...], "directions": [[...]]}.
void write_model(std::ostream& os, const ReluNetwork& net);
ReluNetwork read_model(std::istream& is);
void write_model_file(const std::string& path, const ReluNetwork& net);
ReluNetwork read_model_file(const std::string& path);

// Samples file: u64 LE count, u64 LE dim, then per sample dim+1 f64 LE
// (x then y).
void write_samples(std::ostream& os, const SampleSet& s);
SampleSet read_samples(std::istream& is);
void write_samples_file(const std::string& path, const SampleSet& s);
SampleSet read_samples_file(const std::string& path);

}  // namespace mspec

#endif
