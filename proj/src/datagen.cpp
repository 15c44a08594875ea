#include "mspec/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "mspec/error.hpp"
#include "mspec/rng.hpp"
#include "mspec/serialize.hpp"
#include "mspec/threading.hpp"

namespace mspec {

using nlohmann::json;

namespace {

void normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n == 0.0)
    throw Error(ErrorKind::InvalidArgument, "cannot normalize zero vector");
  for (double& x : v) x /= n;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> haar_direction(const CounterRng& rng, std::size_t d,
                                   std::uint64_t base_pair) {
  std::vector<double> v(d);
  rng.gaussian_fill(v, base_pair);
  normalize(v);
  return v;
}

}  // namespace

ReluNetwork ReluNetwork::create(std::size_t dim, std::vector<double> weights,
                                std::vector<std::vector<double>> dirs) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "network dim must be >= 1");
  if (weights.size() != dirs.size() || weights.empty())
    throw Error(ErrorKind::InvalidArgument,
                "network needs matching, nonempty weights and directions");
  double wsum = 0.0;
  for (double w : weights) wsum += std::fabs(w);
  if (wsum > 1.0 + 1e-12)
    throw Error(ErrorKind::InvalidArgument,
                "sum of |weights| is " + std::to_string(wsum) + ", must be <= 1");
  for (const auto& v : dirs) {
    if (v.size() != dim)
      throw Error(ErrorKind::InvalidArgument, "direction dim mismatch");
    double n = 0.0;
    for (double x : v) n += x * x;
    if (std::fabs(n - 1.0) > 1e-12 * 2 + 1e-12)
      throw Error(ErrorKind::InvalidArgument,
                  "directions must be unit vectors (|v|^2 = " + std::to_string(n) + ")");
  }
  ReluNetwork net;
  net.dim = dim;
  net.width = weights.size();
  net.weights = std::move(weights);
  net.dirs = std::move(dirs);
  return net;
}

double evaluate(const ReluNetwork& net, std::span<const double> x) {
  if (x.size() != net.dim)
    throw Error(ErrorKind::ShapeMismatch, "evaluate: input dim mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < net.width; ++i) {
    const double a = dot(net.dirs[i], x);
    if (a > 0) s += net.weights[i] * a;
  }
  return s;
}

SampleSet sample(const ReluNetwork& net, std::size_t n, std::uint64_t seed,
                 std::uint64_t stream, double noise_sigma, int threads) {
  SampleSet out;
  out.n = n;
  out.dim = net.dim;
  out.x.resize(n * net.dim);
  out.y.resize(n);
  const CounterRng rng(seed, stream);
  const CounterRng noise(seed, rng_stream::kNoise);
  const std::uint64_t pairs_per_sample = (net.dim + 1) / 2;
  const std::size_t block = 8192;
  const std::size_t n_blocks = (n + block - 1) / block;
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * block, hi = std::min(n, lo + block);
    for (std::size_t i = lo; i < hi; ++i) {
      std::span<double> row(out.x.data() + i * net.dim, net.dim);
      rng.gaussian_fill(row, i * pairs_per_sample);
      double y = evaluate(net, row);
      if (noise_sigma > 0) y += noise_sigma * noise.gaussian(i);
      out.y[i] = y;
    }
  });
  return out;
}

SampleSource make_source(const SampleSet& s) {
  SampleSource src;
  src.n = s.n;
  src.dim = s.dim;
  src.fetch = [&s](std::size_t first, std::size_t count, double* x, double* y) {
    std::copy_n(s.x.data() + first * s.dim, count * s.dim, x);
    std::copy_n(s.y.data() + first, count, y);
  };
  return src;
}

SampleSource make_source(const ReluNetwork& net, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream, double noise_sigma) {
  SampleSource src;
  src.n = n;
  src.dim = net.dim;
  const CounterRng rng(seed, stream);
  const CounterRng noise(seed, rng_stream::kNoise);
  const std::uint64_t pairs_per_sample = (net.dim + 1) / 2;
  src.fetch = [net, rng, noise, noise_sigma, pairs_per_sample](
                  std::size_t first, std::size_t count, double* x, double* y) {
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t i = first + r;
      std::span<double> row(x + r * net.dim, net.dim);
      rng.gaussian_fill(row, i * pairs_per_sample);
      double yi = evaluate(net, row);
      if (noise_sigma > 0) yi += noise_sigma * noise.gaussian(i);
      y[r] = yi;
    }
  };
  return src;
}

WeightProfile parse_profile(const std::string& name) {
  if (name == "generic") return WeightProfile::Generic;
  if (name == "near-parallel") return WeightProfile::NearParallel;
  if (name == "cancelling") return WeightProfile::Cancelling;
  throw Error(ErrorKind::InvalidArgument, "unknown weight profile: " + name);
}

const char* profile_name(WeightProfile p) {
  switch (p) {
    case WeightProfile::Generic: return "generic";
    case WeightProfile::NearParallel: return "near-parallel";
    case WeightProfile::Cancelling: return "cancelling";
  }
  return "?";
}

ReluNetwork random_network(std::size_t d, std::size_t k, WeightProfile profile,
                           std::uint64_t seed, double theta) {
  if (k < 1 || d < k)
    throw Error(ErrorKind::InvalidArgument, "random_network: need 1 <= k <= d");
  const CounterRng rng(seed, rng_stream::kNetwork);
  // counter layout: directions use pair blocks [i*(d+2), ...), scalars use
  // the word space above 2^40.
  auto scalar = [&](std::uint64_t i) { return rng.uniform((std::uint64_t{1} << 40) + i); };

  std::vector<double> w(k);
  // Dirichlet(1) magnitudes scaled to total in [0.7, 1.0]
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = -std::log(scalar(2 * i));
    total += w[i];
  }
  const double target = 0.7 + 0.3 * scalar(2 * k);
  for (double& wi : w) wi *= target / total;

  std::vector<std::vector<double>> dirs(k);
  switch (profile) {
    case WeightProfile::Generic: {
      for (std::size_t i = 0; i < k; ++i)
        dirs[i] = haar_direction(rng, d, i * (d + 2));
      break;
    }
    case WeightProfile::NearParallel: {
      // v_i = cos(phi_i) u + sin(phi_i) r_i with phi_i <= theta/2, so all
      // pairwise angles are <= theta by the triangle inequality.
      auto u = haar_direction(rng, d, k * (d + 2));
      for (std::size_t i = 0; i < k; ++i) {
        auto r = haar_direction(rng, d, i * (d + 2));
        const double along = dot(r, u);
        for (std::size_t j = 0; j < d; ++j) r[j] -= along * u[j];
        normalize(r);
        const double phi = 0.5 * theta * scalar(100 + i);
        dirs[i].resize(d);
        for (std::size_t j = 0; j < d; ++j)
          dirs[i][j] = std::cos(phi) * u[j] + std::sin(phi) * r[j];
        normalize(dirs[i]);
      }
      // signed weights make the instance genuinely hard
      for (std::size_t i = 0; i < k; ++i)
        if (scalar(200 + i) < 0.5) w[i] = -w[i];
      break;
    }
    case WeightProfile::Cancelling: {
      if (k < 2)
        throw Error(ErrorKind::InvalidArgument,
                    "cancelling profile requires k >= 2");
      for (std::size_t i = 0; i + 1 < k; ++i) {
        dirs[i] = haar_direction(rng, d, i * (d + 2));
        if (scalar(200 + i) < 0.5) w[i] = -w[i];
      }
      std::vector<double> r(d, 0.0);
      for (std::size_t i = 0; i + 1 < k; ++i)
        for (std::size_t j = 0; j < d; ++j) r[j] += w[i] * dirs[i][j];
      double rn = 0.0;
      for (double x : r) rn += x * x;
      rn = std::sqrt(rn);
      if (rn < 1e-14) {
        // already cancelled; any direction keeps the sum ~0 with tiny w_k
        dirs[k - 1] = haar_direction(rng, d, (k - 1) * (d + 2));
        w[k - 1] = 0.0;
      } else {
        dirs[k - 1].resize(d);
        for (std::size_t j = 0; j < d; ++j) dirs[k - 1][j] = -r[j] / rn;
        w[k - 1] = rn;
      }
      break;
    }
  }

  double wsum = 0.0;
  for (double wi : w) wsum += std::fabs(wi);
  if (wsum > 1.0)
    for (double& wi : w) wi /= wsum;
  return ReluNetwork::create(d, std::move(w), std::move(dirs));
}

void write_model(std::ostream& os, const ReluNetwork& net) {
  json j;
  j["dim"] = net.dim;
  j["width"] = net.width;
  j["weights"] = net.weights;
  j["directions"] = net.dirs;
  os << j.dump(2) << "\n";
}

ReluNetwork read_model(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model json: ") + e.what());
  }
  try {
    return ReluNetwork::create(j.at("dim").get<std::size_t>(),
                               j.at("weights").get<std::vector<double>>(),
                               j.at("directions").get<std::vector<std::vector<double>>>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model json fields: ") + e.what());
  }
}

void write_model_file(const std::string& path, const ReluNetwork& net) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  write_model(os, net);
  if (!os) throw Error(ErrorKind::Io, "short write to " + path);
}

ReluNetwork read_model_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
  return read_model(is);
}

void write_samples(std::ostream& os, const SampleSet& s) {
  write_u64_le(os, s.n);
  write_u64_le(os, s.dim);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = 0; j < s.dim; ++j) write_f64_le(os, s.x[i * s.dim + j]);
    write_f64_le(os, s.y[i]);
  }
}

SampleSet read_samples(std::istream& is) {
  SampleSet s;
  const std::uint64_t n = read_u64_le(is);
  const std::uint64_t dim = read_u64_le(is);
  if (!is) throw Error(ErrorKind::Parse, "samples: truncated header");
  if (dim == 0) throw Error(ErrorKind::Parse, "samples: dim 0");
  if (n > (std::uint64_t{1} << 40))
    throw Error(ErrorKind::Parse, "samples: implausible count in header");
  s.n = static_cast<std::size_t>(n);
  s.dim = static_cast<std::size_t>(dim);
  s.x.resize(s.n * s.dim);
  s.y.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = 0; j < s.dim; ++j) s.x[i * s.dim + j] = read_f64_le(is);
    s.y[i] = read_f64_le(is);
  }
  if (!is) throw Error(ErrorKind::Parse, "samples: truncated records");
  return s;
}

void write_samples_file(const std::string& path, const SampleSet& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  write_samples(os, s);
  if (!os) throw Error(ErrorKind::Io, "short write to " + path);
}

SampleSet read_samples_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
  return read_samples(is);
}

}  // namespace mspec
