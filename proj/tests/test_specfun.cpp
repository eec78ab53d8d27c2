#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cogfso/quadrature.hpp"
#include "cogfso/specfun.hpp"

using namespace cogfso;

namespace {

// Series oracle for J0: sum_k (-x^2/4)^k / (k!)^2.
double j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// erfc oracle built from the complementary-error continued expansion of
// the incomplete gamma is circular; use the Taylor/asymptotic-free
// alternating series for erf on the needed range instead.
double erfc_series(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 300; ++k) {
    term *= -x * x / k;
    sum += term / (2.0 * k + 1.0);
    if (std::abs(term) < 1e-19) break;
  }
  return 1.0 - 2.0 / std::sqrt(3.14159265358979323846) * sum;
}

}  // namespace

TEST_CASE("reg_lower_gamma pinned values", "[specfun]") {
  CHECK(specfun::reg_lower_gamma(1.0, 0.0) == 0.0);
  CHECK_THAT(specfun::reg_lower_gamma(1.0, std::log(2.0)),
             Catch::Matchers::WithinAbs(0.5, 1e-14));
  // integer-s finite-sum oracle, frozen
  const double x = 3.5;
  double sum = 0.0, t = std::exp(-x);
  for (int m = 0; m < 6; ++m) {
    sum += t;
    t *= x / (m + 1);
  }
  const double oracle = 1.0 - sum;
  CHECK_THAT(specfun::reg_lower_gamma(6.0, 3.5), Catch::Matchers::WithinAbs(oracle, 1e-14));
  CHECK_THAT(specfun::reg_lower_gamma(6.0, 3.5), Catch::Matchers::WithinAbs(0.142386, 1e-6));
}

TEST_CASE("reg_lower_gamma domain errors", "[specfun]") {
  CHECK_THROWS_AS(specfun::reg_lower_gamma(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(specfun::reg_lower_gamma(-2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(specfun::reg_lower_gamma(1.0, -0.5), std::domain_error);
  CHECK_THROWS_AS(specfun::upper_gamma(-1.0, 1.0), std::domain_error);
}

TEST_CASE("reg_lower_gamma monotone with limits", "[specfun]") {
  for (double s : {0.5, 1.0, 3.0, 6.0, 12.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = 50.0 * i / 200.0;
      const double v = specfun::reg_lower_gamma(s, x);
      CHECK(v >= prev - 1e-15);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
    CHECK(specfun::reg_lower_gamma(s, 0.0) == 0.0);
    CHECK_THAT(specfun::reg_lower_gamma(s, 800.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("upper_gamma pinned values", "[specfun]") {
  CHECK_THAT(specfun::upper_gamma(2.0, 0.0), Catch::Matchers::WithinAbs(1.0, 1e-14));
  CHECK_THAT(specfun::upper_gamma(1.0, 1.0),
             Catch::Matchers::WithinAbs(std::exp(-1.0), 1e-14));
  const double oracle = std::sqrt(3.14159265358979323846) * erfc_series(1.0);
  CHECK_THAT(specfun::upper_gamma(0.5, 1.0), Catch::Matchers::WithinRel(oracle, 1e-12));
  CHECK_THAT(specfun::upper_gamma(0.5, 1.0), Catch::Matchers::WithinAbs(0.2788056, 5e-7));
}

TEST_CASE("upper_gamma consistency with reg_lower_gamma", "[specfun]") {
  for (double s : {0.3, 1.0, 2.7, 6.0, 15.5}) {
    for (double x : {0.1, 1.0, 3.0, 10.0}) {
      const double lhs = specfun::upper_gamma(s, x);
      const double rhs = std::tgamma(s) * (1.0 - specfun::reg_lower_gamma(s, x));
      // 1e-12 relative, with the unavoidable absolute floor of forming
      // 1 - P in doubles when P is close to one
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs) + 4e-16 * std::tgamma(s));
    }
  }
}

TEST_CASE("j_func pinned values", "[specfun]") {
  CHECK_THAT(specfun::j_func(1, 1.0, 1.0),
             Catch::Matchers::WithinRel(std::exp(-1.0), 1e-13));
  CHECK_THAT(specfun::j_func(2, 1.0, 0.0), Catch::Matchers::WithinRel(1.0, 1e-13));
  // finite-sum oracle: Gamma(3,1)/2^3 = 2 e^{-1} (1 + 1 + 0.5) / 8
  const double oracle = 2.0 * std::exp(-1.0) * 2.5 / 8.0;
  CHECK_THAT(specfun::j_func(3, 2.0, 0.5), Catch::Matchers::WithinRel(oracle, 1e-13));
  CHECK_THAT(specfun::j_func(3, 2.0, 0.5), Catch::Matchers::WithinAbs(0.2299247, 5e-7));
}

TEST_CASE("j_func matches finite-sum form", "[specfun]") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ub(0.05, 8.0), ur(0.0, 4.0);
  std::uniform_int_distribution<int> ua(1, 20);
  for (int trial = 0; trial < 40; ++trial) {
    const int a = ua(rng);
    const double b = ub(rng), ratio = ur(rng);
    double sum = 0.0, t = 1.0;
    for (int l = 0; l < a; ++l) {
      sum += t;
      t *= b * ratio / (l + 1);
    }
    const double finite = std::tgamma(static_cast<double>(a)) / std::pow(b, a) *
                          std::exp(-b * ratio) * sum;
    CHECK_THAT(specfun::j_func(a, b, ratio), Catch::Matchers::WithinRel(finite, 1e-12));
  }
}

TEST_CASE("j_func matches its defining integral", "[specfun]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ub(0.1, 5.0), ur(0.0, 3.0);
  std::uniform_int_distribution<int> ua(1, 12);
  for (int trial = 0; trial < 20; ++trial) {
    const int a = ua(rng);
    const double b = ub(rng), ratio = ur(rng);
    auto f = [&](double zz) { return std::pow(zz, a - 1.0) * std::exp(-b * zz); };
    const auto res = quad::integrate_from(f, ratio, {1e-13, 1e-11, 400000});
    REQUIRE(res.converged);
    CHECK_THAT(specfun::j_func(a, b, ratio),
               Catch::Matchers::WithinRel(res.value, 1e-9));
  }
}

TEST_CASE("bessel_j0 pinned values and series oracle", "[specfun]") {
  CHECK(specfun::bessel_j0(0.0) == 1.0);
  CHECK_THAT(specfun::bessel_j0(1.0), Catch::Matchers::WithinAbs(j0_series(1.0), 1e-12));
  CHECK_THAT(specfun::bessel_j0(1.0), Catch::Matchers::WithinAbs(0.7651976, 1e-6));
  // first zero located by bisection on the series oracle
  double lo = 2.0, hi = 3.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (j0_series(lo) * j0_series(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double zero = 0.5 * (lo + hi);
  CHECK_THAT(zero, Catch::Matchers::WithinAbs(2.404826, 1e-5));
  CHECK_THAT(specfun::bessel_j0(zero), Catch::Matchers::WithinAbs(0.0, 1e-6));
}

TEST_CASE("bessel_j0 even and bounded on [-10,10]", "[specfun]") {
  for (int i = 0; i <= 400; ++i) {
    const double x = -10.0 + 20.0 * i / 400.0;
    const double v = specfun::bessel_j0(x);
    CHECK_THAT(v, Catch::Matchers::WithinAbs(j0_series(x), 1e-12));
    CHECK(v == specfun::bessel_j0(-x));
    CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
}
