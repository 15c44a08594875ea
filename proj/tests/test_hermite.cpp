#include <doctest.h>

#include <cmath>

#include "mspec/error.hpp"
#include "mspec/hermite.hpp"
#include "mspec/matrix.hpp"
#include "mspec/rng.hpp"
#include "support/dense_tensor.hpp"

using namespace mspec;
using namespace mspec_test;

namespace {

// explicit probabilist polynomials, the non-recurrence route
double he_explicit(int m, double t) {
  switch (m) {
    case 0: return 1;
    case 1: return t;
    case 2: return t * t - 1;
    case 3: return t * (t * t - 3);
    case 4: return t * t * (t * t - 6) + 3;
    case 5: return t * t * t * (t * t - 10) + 15 * t;
    case 6: return -15 + t * t * (45 + t * t * (-15 + t * t));
    default: return t * he_explicit(m - 1, t) - (m - 1) * he_explicit(m - 2, t);
  }
}

double factorial(int m) {
  double f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// Definition of H_m by partitions into singletons and pairs, m <= 3 only.
DenseTensor hermite_tensor_partition_oracle(std::size_t m,
                                            const std::vector<double>& x) {
  const std::size_t d = x.size();
  DenseTensor out(d, m);
  const double scale = 1.0 / std::sqrt(factorial(static_cast<int>(m)));
  for (std::size_t flat = 0; flat < out.v.size(); ++flat) {
    const auto idx = DenseTensor::decode(flat, d, m);
    double s = 0.0;
    if (m == 0) {
      s = 1.0;
    } else if (m == 1) {
      s = x[idx[0]];
    } else if (m == 2) {
      s = x[idx[0]] * x[idx[1]] - (idx[0] == idx[1] ? 1.0 : 0.0);
    } else if (m == 3) {
      s = x[idx[0]] * x[idx[1]] * x[idx[2]];
      s -= (idx[0] == idx[1] ? 1.0 : 0.0) * x[idx[2]];
      s -= (idx[0] == idx[2] ? 1.0 : 0.0) * x[idx[1]];
      s -= (idx[1] == idx[2] ? 1.0 : 0.0) * x[idx[0]];
    }
    out.v[flat] = s * scale;
  }
  return out;
}

}  // namespace

TEST_SUITE("hermite") {

TEST_CASE("hermite_eval: frozen examples and explicit polynomials") {
  CHECK(hermite_eval(0, 3.7) == 1.0);
  CHECK(hermite_eval(1, 2.0) == 2.0);
  CHECK(hermite_eval(2, 0.0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  for (int m = 0; m <= 10; ++m)
    for (double t : {-3.0, -1.2, 0.0, 0.5, 2.7}) {
      const double expect = he_explicit(m, t) / std::sqrt(factorial(m));
      CHECK(hermite_eval(m, t) == doctest::Approx(expect).epsilon(1e-12));
    }
  CHECK_THROWS_AS((void)hermite_eval(2, std::nan("")), Error);
}

TEST_CASE("hermite_all matches hermite_eval entrywise") {
  const auto h = hermite_all(3, 1.0);
  REQUIRE(h.size() == 4);
  CHECK(h[0] == 1.0);
  CHECK(h[1] == 1.0);
  CHECK(h[2] == doctest::Approx(0.0));
  CHECK(h[3] == doctest::Approx(-2.0 / std::sqrt(6.0)).epsilon(1e-12));
  const auto h2 = hermite_all(2, 0.0);
  CHECK(h2[2] == doctest::Approx(-0.70710678118654752).epsilon(1e-12));
  CHECK(hermite_all(0, 1.0).size() == 1);
  for (std::size_t m = 0; m <= 12; ++m)
    CHECK(hermite_all(12, 0.37)[m] == hermite_eval(m, 0.37));
}

TEST_CASE("relu_coeff: frozen oracle values") {
  // values computed from exact half-moment integrals (independent scratch
  // computation); the quadrature oracle below re-derives them
  CHECK(relu_coeff(0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(relu_coeff(1) == 0.5);
  CHECK(relu_coeff(2) == doctest::Approx(0.2820947917738781).epsilon(1e-14));
  CHECK(relu_coeff(3) == 0.0);
  CHECK(relu_coeff(4) == doctest::Approx(-0.08143375198382008).epsilon(1e-13));
  CHECK(relu_coeff(6) == doctest::Approx(0.04460310290381928).epsilon(1e-13));
  CHECK(relu_coeff(24) == doctest::Approx(-0.006963669528556276).epsilon(1e-11));
  for (std::size_t m = 3; m <= 25; m += 2) CHECK(relu_coeff(m) == 0.0);
}

TEST_CASE("relu_coeff vs 128-node quadrature within 1e-8 up to m = 24") {
  for (std::size_t m = 0; m <= 24; ++m) {
    const double q = relu_coeff_quadrature(m, 128);
    CHECK(std::fabs(relu_coeff(m) - q) <= 1e-8);
  }
}

TEST_CASE("relu_coeff_all matches relu_coeff") {
  const auto c = relu_coeff_all(40);
  for (std::size_t m = 0; m <= 40; ++m) CHECK(c[m] == relu_coeff(m));
}

TEST_CASE("coefficient decay bracket |c_m| m^{5/4} in [0.1, 10]") {
  for (std::size_t m = 2; m <= 64; m += 2) {
    const double v = std::fabs(relu_coeff(m)) * std::pow(double(m), 1.25);
    CHECK(v >= 0.1);
    CHECK(v <= 10.0);
  }
}

TEST_CASE("Parseval: sum c_m^2 approaches E[ReLU(G)^2] = 1/2") {
  double s = 0.0;
  for (std::size_t m = 0; m <= 5000; ++m) {
    const double c = relu_coeff(m);
    s += c * c;
  }
  CHECK(s == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("orthonormality via 64-node quadrature, n,m <= 12") {
  const QuadratureRule& rule = gauss_hermite(64);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t n = 0; n <= 12; ++n)
    for (std::size_t m = 0; m <= 12; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const auto h = hermite_all(12, rule.nodes[i]);
        s += rule.weights[i] * h[n] * h[m];
      }
      CHECK(std::fabs(s - (n == m ? 1.0 : 0.0)) <= 1e-9);
    }
}

TEST_CASE("hermite_tensor: frozen examples") {
  const std::vector<double> x = {1.3, -0.4};
  SymTensor h1 = hermite_tensor(1, x);
  CHECK(h1.at({1, 0}) == doctest::Approx(1.3));
  CHECK(h1.at({0, 1}) == doctest::Approx(-0.4));

  SymTensor h2 = hermite_tensor(2, x);
  CHECK(h2.at({2, 0}) == doctest::Approx((1.3 * 1.3 - 1) / std::sqrt(2.0)));
  CHECK(h2.at({1, 1}) == doctest::Approx(1.3 * -0.4 / std::sqrt(2.0)));
  CHECK(h2.at({0, 2}) == doctest::Approx((0.16 - 1) / std::sqrt(2.0)));

  SymTensor h0 = hermite_tensor(0, x);
  CHECK(h0[0] == 1.0);
}

TEST_CASE("hermite_tensor agrees with the partition-sum definition, m <= 3") {
  const CounterRng rng(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 2 + trial % 2;
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(trial * 8 + i, -2.0, 2.0);
    for (std::size_t m = 0; m <= 3; ++m) {
      const SymTensor lib = hermite_tensor(m, x);
      const SymTensor oracle = to_compressed(hermite_tensor_partition_oracle(m, x));
      REQUIRE(lib.size() == oracle.size());
      for (std::size_t i = 0; i < lib.size(); ++i)
        CHECK(lib[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("contraction identity <H_m(x), v^m> = h_m(v.x), 200 trials") {
  const CounterRng rng(11, 0);
  std::uint64_t ctr = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 5;
    const std::size_t m = 1 + trial % 8;
    std::vector<double> x(d), v(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rng.uniform(ctr++, -2.5, 2.5);
      v[i] = rng.uniform(ctr++, -1.0, 1.0);
    }
    double nv = 0.0;
    for (double c : v) nv += c * c;
    nv = std::sqrt(nv);
    for (double& c : v) c /= nv;
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += v[i] * x[i];
    const double lhs = inner(hermite_tensor(m, x), power(v, m));
    worst = std::max(worst, std::fabs(lhs - hermite_eval(m, dot)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("projection compatibility: H_m(B'x) = B'-transform of H_m(x)") {
  const CounterRng rng(13, 0);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 3, k = 2;
    // random orthonormal basis via Gram-Schmidt
    Matrix cols(d, k);
    for (std::size_t i = 0; i < d * k; ++i) cols.a[i] = rng.uniform(ctr++, -1.0, 1.0);
    const Matrix b = orthonormalize(cols);
    REQUIRE(b.cols == k);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(ctr++, -2.0, 2.0);
    const std::vector<double> z = matvec_t(b, x);
    for (std::size_t m = 1; m <= 4; ++m) {
      const SymTensor direct = hermite_tensor(m, z);
      const DenseTensor full = to_dense(hermite_tensor(m, x));
      const SymTensor projected = to_compressed(dense_basis_transform(full, b));
      REQUIRE(direct.size() == projected.size());
      for (std::size_t i = 0; i < direct.size(); ++i)
        CHECK(direct[i] == doctest::Approx(projected[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("hermite_tensor respects the entry budget") {
  const std::size_t saved = entry_budget();
  set_entry_budget(10);
  std::vector<double> x(5, 0.3);
  CHECK_THROWS_AS((void)hermite_tensor(4, x), Error);
  set_entry_budget(saved);
}

}  // TEST_SUITE
