#include "mspec/verify_suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mspec/hermite.hpp"
#include "mspec/rng.hpp"
#include "mspec/schur.hpp"
#include "mspec/symtensor.hpp"

namespace mspec {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

SuiteOutcome suite_hermite(std::uint64_t seed) {
  SuiteOutcome out;
  out.name = "hermite";
  out.pass = true;

  // orthonormality through 64-node quadrature
  const QuadratureRule& rule = gauss_hermite(64);
  double worst_ortho = 0.0;
  for (std::size_t n = 0; n <= 12; ++n)
    for (std::size_t m = 0; m <= 12; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const auto h = hermite_all(std::max(n, m), rule.nodes[i]);
        s += rule.weights[i] * h[n] * h[m];
      }
      const double expect = n == m ? 1.0 : 0.0;
      worst_ortho = std::max(worst_ortho, std::fabs(s - expect));
    }
  if (worst_ortho > 1e-9) out.pass = false;
  out.lines.push_back("orthonormality max |E[h_n h_m] - delta| = " + fmt(worst_ortho) +
                      (worst_ortho <= 1e-9 ? " <= 1e-9" : " EXCEEDS 1e-9"));

  // contraction identity over 200 random (x, unit v)
  double worst_contr = 0.0;
  const CounterRng rng(seed, rng_stream::kTrial);
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 5;       // 2..6
    const std::size_t m = 1 + trial % 8;       // 1..8
    std::vector<double> x(d), v(d);
    rng.gaussian_fill(x, trial * 16);
    rng.gaussian_fill(v, trial * 16 + 8);
    double nv = 0.0;
    for (double c : v) nv += c * c;
    nv = std::sqrt(nv);
    for (double& c : v) c /= nv;
    const SymTensor hm = hermite_tensor(m, x);
    const SymTensor vm = power(v, m);
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += v[i] * x[i];
    const double lhs = inner(hm, vm);
    const double rhs = hermite_eval(m, dot);
    worst_contr = std::max(worst_contr, std::fabs(lhs - rhs));
  }
  if (worst_contr > 1e-9) out.pass = false;
  out.lines.push_back("contraction max |<H_m(x), v^m> - h_m(v.x)| = " + fmt(worst_contr) +
                      (worst_contr <= 1e-9 ? " <= 1e-9" : " EXCEEDS 1e-9"));
  return out;
}

SuiteOutcome suite_relu_coefficients() {
  SuiteOutcome out;
  out.name = "relu-coefficients";
  out.pass = true;

  double worst = 0.0;
  for (std::size_t m = 0; m <= 24; ++m)
    worst = std::max(worst, std::fabs(relu_coeff(m) - relu_coeff_quadrature(m, 128)));
  if (worst > 1e-8) out.pass = false;
  out.lines.push_back("max |c_m - quadrature| (m <= 24) = " + fmt(worst) +
                      (worst <= 1e-8 ? " <= 1e-8" : " EXCEEDS 1e-8"));

  bool odd_zero = true;
  for (std::size_t m = 3; m <= 63; m += 2)
    if (relu_coeff(m) != 0.0) odd_zero = false;
  if (!odd_zero) out.pass = false;
  out.lines.push_back(std::string("c_m = 0 exactly for odd m > 1: ") +
                      (odd_zero ? "yes" : "NO"));

  double lo = 1e300, hi = 0.0;
  for (std::size_t m = 2; m <= 64; m += 2) {
    const double v = std::fabs(relu_coeff(m)) * std::pow(static_cast<double>(m), 1.25);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool bracket = lo >= 0.1 && hi <= 10.0;
  if (!bracket) out.pass = false;
  out.lines.push_back("|c_m| m^{5/4} range over even m <= 64: [" + fmt(lo) + ", " +
                      fmt(hi) + (bracket ? "] inside [0.1, 10]" : "] OUTSIDE [0.1, 10]"));
  return out;
}

SuiteOutcome suite_schur(std::uint64_t seed) {
  SuiteOutcome out;
  out.name = "schur";
  out.pass = true;

  // all partitions with |lambda| <= 6 and at most 4 parts
  std::vector<std::vector<int>> partitions;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= a; ++b)
      for (int c = 0; c <= b; ++c)
        for (int e = 0; e <= c; ++e)
          if (a + b + c + e <= 6) partitions.push_back({a, b, c, e});

  double worst = 0.0;
  bool coeffs_ok = true;
  bool homogeneous_ok = true;
  bool ones_ok = true;
  const CounterRng rng(seed, rng_stream::kTrial);
  std::uint64_t ctr = 0;
  for (const auto& parts : partitions) {
    const Partition lambda{std::vector<int>(parts)};
    for (std::size_t n = std::max<std::size_t>(1, lambda.num_parts()); n <= 4; ++n) {
      const SymmetricPolynomial p = jacobi_trudi(lambda, n);
      mpz_class abs_sum = 0;
      for (const auto& [e, c] : p.monomials()) {
        if (c < 0) coeffs_ok = false;
        abs_sum += abs(c);
        int deg = 0;
        for (int q : e) deg += q;
        if (deg != lambda.size()) homogeneous_ok = false;
      }
      if (abs_sum != p.value_at_ones()) ones_ok = false;
      for (std::size_t rep = 0; rep < 50; ++rep) {
        // distinct entries: spread draws apart to keep the system tame
        std::vector<double> x(n);
        bool ok = false;
        while (!ok) {
          for (std::size_t j = 0; j < n; ++j) x[j] = rng.uniform(ctr++, -2.0, 2.0);
          ok = true;
          for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
              if (std::fabs(x[i] - x[j]) < 0.05) ok = false;
        }
        const double via_b = schur_bialternant(lambda, x);
        const double via_jt = p.evaluate(x);
        const double err = std::fabs(via_b - via_jt) / (1.0 + std::fabs(via_jt));
        worst = std::max(worst, err);
      }
    }
  }
  if (worst > 1e-8) out.pass = false;
  out.lines.push_back("bialternant vs Jacobi-Trudi max rel err = " + fmt(worst) +
                      (worst <= 1e-8 ? " <= 1e-8" : " EXCEEDS 1e-8"));
  if (!coeffs_ok) out.pass = false;
  out.lines.push_back(std::string("all Jacobi-Trudi coefficients non-negative integers: ") +
                      (coeffs_ok ? "yes" : "NO"));
  if (!homogeneous_ok) out.pass = false;
  out.lines.push_back(std::string("homogeneous of degree |lambda|: ") +
                      (homogeneous_ok ? "yes" : "NO"));
  if (!ones_ok) out.pass = false;
  out.lines.push_back(std::string("s_lambda(1,..,1) equals coefficient mass: ") +
                      (ones_ok ? "yes" : "NO"));

  const double v30 = schur_bialternant(Partition({2, 1}), std::vector<double>{2.0, 3.0});
  const bool frozen = std::fabs(v30 - 30.0) <= 1e-8 * 31.0;
  if (!frozen) out.pass = false;
  out.lines.push_back("s_(2,1)(2,3) = " + fmt(v30) + (frozen ? " (= 30)" : " (EXPECTED 30)"));
  return out;
}

SuiteOutcome suite_tensor_recursion(std::uint64_t seed) {
  SuiteOutcome out;
  out.name = "tensor-recursion";
  out.pass = true;
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t t = k; t <= 8; ++t)
      for (std::size_t dim = 2; dim <= 3; ++dim) {
        const VerifyReport rep = verify_tensor_recursion(k, t, dim, 100, seed + k * 1000 + t * 10 + dim);
        if (!rep.pass) out.pass = false;
        if (!rep.pass || (t == 8 && dim == 3))
          out.lines.push_back("k=" + std::to_string(k) + " t=" + std::to_string(t) +
                              " dim=" + std::to_string(dim) + ": " + rep.detail +
                              (rep.pass ? "" : "  VIOLATIONS " + std::to_string(rep.violations)));
      }
  if (out.pass) out.lines.insert(out.lines.begin(), "all (k,t,dim) grids pass at 1e-8 scale");
  return out;
}

SuiteOutcome suite_moment_bounds(std::uint64_t seed) {
  SuiteOutcome out;
  out.name = "moment-bounds";
  out.pass = true;
  double worst_scalar = 0.0, worst_even = 0.0;
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t t = k; t <= 10; ++t) {
      const VerifyReport rep = verify_scalar_bound(k, t, 1000, seed + 31 * k + t);
      worst_scalar = std::max(worst_scalar, rep.worst_ratio);
      if (!rep.pass) {
        out.pass = false;
        out.lines.push_back("scalar bound violated at k=" + std::to_string(k) +
                            " t=" + std::to_string(t));
      }
    }
    for (std::size_t t = 2 * k; t <= 10; t += 2)
      for (std::size_t dim : {2, 3, 6}) {
        const VerifyReport rep = verify_even_bound(k, t, dim, 1000, seed + 17 * k + t + dim);
        worst_even = std::max(worst_even, rep.worst_ratio);
        if (!rep.pass) {
          out.pass = false;
          out.lines.push_back("even bound violated at k=" + std::to_string(k) +
                              " t=" + std::to_string(t) + " dim=" + std::to_string(dim));
        }
      }
  }
  out.lines.push_back("scalar suite worst |M_t|/bound = " + fmt(worst_scalar));
  out.lines.push_back("even-tensor suite worst |M_t|/bound = " + fmt(worst_even));
  return out;
}

std::vector<SuiteOutcome> run_all_suites(std::uint64_t seed) {
  return {suite_hermite(seed), suite_relu_coefficients(), suite_schur(seed),
          suite_tensor_recursion(seed), suite_moment_bounds(seed)};
}

}  // namespace mspec
