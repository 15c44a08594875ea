#include <doctest.h>

#include <cmath>

#include "mspec/datagen.hpp"
#include "mspec/error.hpp"
#include "mspec/hermite.hpp"
#include "mspec/moments.hpp"
#include "mspec/rng.hpp"
#include "support/dense_tensor.hpp"

using namespace mspec;
using namespace mspec_test;

namespace {

ReluNetwork single_relu(std::size_t d) {
  std::vector<double> e1(d, 0.0);
  e1[0] = 1.0;
  return ReluNetwork::create(d, {1.0}, {e1});
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("analytic_moment: frozen examples") {
  const ReluNetwork net = single_relu(4);
  const SymTensor m2 = analytic_moment(net, 2);
  CHECK(m2.at({2, 0, 0, 0}) == doctest::Approx(relu_coeff(2)));
  CHECK(m2.at({1, 1, 0, 0}) == 0.0);
  CHECK(norm2(analytic_moment(net, 5)) == 0.0);  // odd > 1

  // exact cancellation
  const ReluNetwork cancel =
      ReluNetwork::create(2, {0.5, -0.5}, {{1, 0}, {1, 0}});
  for (std::size_t m = 0; m <= 4; ++m)
    CHECK(norm2(analytic_moment(cancel, m)) == 0.0);
}

TEST_CASE("estimate_moment: zero labels give the zero tensor") {
  const ReluNetwork zero_net = ReluNetwork::create(3, {0.0}, {{1, 0, 0}});
  const SampleSource src = make_source(zero_net, 5000, 3, rng_stream::kSubspace);
  const MomentEstimate est = estimate_moment(src, 2);
  CHECK(norm2(est.tensor) == 0.0);
  CHECK(est.num_samples == 5000);
  CHECK_THROWS_AS(
      (void)estimate_moment(SampleSource{0, 3, nullptr}, 1), Error);
}

TEST_CASE("estimate_moment: constant labels, order-1 concentration") {
  // y = 1: estimate of E[H_1(X)] = 0 should be ~ sqrt(d/N)
  const std::size_t d = 4, n = 200000;
  ReluNetwork net = single_relu(d);
  SampleSet s = sample(net, n, 77, rng_stream::kSubspace);
  std::fill(s.y.begin(), s.y.end(), 1.0);
  const MomentEstimate est = estimate_moment(make_source(s), 1);
  CHECK(norm2(est.tensor) <= 4.0 * std::sqrt(double(d) / double(n)));
}

TEST_CASE("estimate_moment converges to c_2 v^(x)2 (k=1)") {
  const ReluNetwork net = single_relu(6);
  const SampleSource src = make_source(net, 1'000'000, 5, rng_stream::kSubspace);
  const MomentEstimate est = estimate_moment(src, 2, {}, 2);
  const SymTensor diff = add(est.tensor, scale(analytic_moment(net, 2), -1.0));
  CHECK(norm2(diff) <= 0.01);
}

TEST_CASE("estimation is bitwise identical across thread counts") {
  const ReluNetwork net = random_network(5, 2, WeightProfile::Generic, 21);
  const SampleSource src = make_source(net, 30000, 9, rng_stream::kSubspace);
  const auto t1 = estimate_moment_range(src, 1, 4, {}, 1);
  const auto t8 = estimate_moment_range(src, 1, 4, {}, 8);
  REQUIRE(t1.size() == t8.size());
  for (std::size_t m = 0; m < t1.size(); ++m)
    for (std::size_t i = 0; i < t1[m].size(); ++i)
      CHECK(t1[m][i] == t8[m][i]);
}

TEST_CASE("range estimation equals per-order estimation") {
  const ReluNetwork net = random_network(4, 2, WeightProfile::Generic, 31);
  const SampleSource src = make_source(net, 20000, 13, rng_stream::kSubspace);
  const auto range = estimate_moment_range(src, 0, 3);
  for (std::size_t m = 0; m <= 3; ++m) {
    const MomentEstimate single = estimate_moment(src, m);
    for (std::size_t i = 0; i < single.tensor.size(); ++i)
      CHECK(range[m][i] == single.tensor[i]);
  }
}

TEST_CASE("unbiasedness: mean of repeated small-N estimates hits analytic") {
  const ReluNetwork net = random_network(4, 2, WeightProfile::Generic, 41);
  const std::size_t reps = 200, n_small = 200;
  for (std::size_t m = 1; m <= 4; ++m) {
    const SymTensor truth = analytic_moment(net, m);
    SymTensor mean(net.dim, m);
    SymTensor second(net.dim, m);  // entrywise sum of squares
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const SampleSource src =
          make_source(net, n_small, 1000 + rep, rng_stream::kSubspace);
      const MomentEstimate est = estimate_moment(src, m);
      for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] += est.tensor[i];
        second[i] += est.tensor[i] * est.tensor[i];
      }
    }
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double mu = mean[i] / reps;
      const double var =
          std::max(0.0, second[i] / reps - mu * mu) * reps / (reps - 1.0);
      const double se = std::sqrt(var / reps);
      CHECK(std::fabs(mu - truth[i]) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("subspace consistency: basis estimation equals projected estimation") {
  const ReluNetwork net = random_network(3, 2, WeightProfile::Generic, 51);
  const SampleSet s = sample(net, 5000, 17, rng_stream::kSubspace);
  // orthonormal basis from the network's own directions
  Matrix cols(3, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t r = 0; r < 3; ++r) cols(r, i) = net.dirs[i][r];
  const Matrix b = orthonormalize(cols);
  REQUIRE(b.cols == 2);
  for (std::size_t m = 1; m <= 4; ++m) {
    const MomentEstimate direct = estimate_moment(make_source(s), m, b);
    const MomentEstimate full = estimate_moment(make_source(s), m);
    const SymTensor projected =
        to_compressed(dense_basis_transform(to_dense(full.tensor), b));
    REQUIRE(direct.tensor.size() == projected.size());
    for (std::size_t i = 0; i < projected.size(); ++i)
      CHECK(direct.tensor[i] == doctest::Approx(projected[i]).epsilon(1e-9));
  }
}

TEST_CASE("error scaling is ~ 1/sqrt(N)") {
  const ReluNetwork net = single_relu(4);
  const SymTensor truth = analytic_moment(net, 2);
  std::vector<double> log_n, log_err;
  for (const std::size_t n : {1000u, 10000u, 100000u}) {
    double err_sum = 0.0;
    const int reps = 8;
    for (int rep = 0; rep < reps; ++rep) {
      const SampleSource src =
          make_source(net, n, 300 + rep, rng_stream::kSubspace);
      const SymTensor diff =
          add(estimate_moment(src, 2).tensor, scale(truth, -1.0));
      err_sum += norm2(diff);
    }
    log_n.push_back(std::log10(double(n)));
    log_err.push_back(std::log10(err_sum / reps));
  }
  const double slope = (log_err.back() - log_err.front()) /
                       (log_n.back() - log_n.front());
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));
}

TEST_CASE("sample_size: formula, scaling, and subspace ratio") {
  // frozen from the bound C(d+m,m) e^{m/t} y^2 / (tau^2 delta^2) at t = m:
  // ceil(2 e / 1e-4) = 54366
  CHECK(sample_size(1, 1, 0.1, 0.1, 1.0) == 54366);
  // delta halved -> N quadruples (up to the ceil)
  CHECK(sample_size(1, 1, 0.05, 0.1, 1.0) == 217463);
  CHECK(std::fabs(double(sample_size(1, 1, 0.05, 0.1, 1.0)) -
                  4.0 * double(sample_size(1, 1, 0.1, 0.1, 1.0))) <= 3.0);
  const double ratio = double(sample_size(3, 8, 0.1, 0.1, 1.0)) /
                       double(sample_size(3, 2, 0.1, 0.1, 1.0));
  const double expect = binomial_dbl(11, 3) / binomial_dbl(5, 3);
  CHECK(ratio == doctest::Approx(expect).epsilon(1e-3));
  CHECK_THROWS_AS((void)sample_size(40, 1000, 1e-9, 1e-9, 10.0), Error);
  CHECK_THROWS_AS((void)sample_size(2, 2, -0.1, 0.1, 1.0), Error);
}

}  // TEST_SUITE
