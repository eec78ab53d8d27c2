#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cogfso/quadrature.hpp"

using namespace cogfso;

TEST_CASE("finite integrals", "[quadrature]") {
  auto r1 = quad::integrate([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846);
  REQUIRE(r1.converged);
  CHECK_THAT(r1.value, Catch::Matchers::WithinAbs(2.0, 1e-12));

  auto r2 = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  REQUIRE(r2.converged);
  CHECK_THAT(r2.value, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-10));
}

TEST_CASE("half-line integrals", "[quadrature]") {
  auto r1 = quad::integrate_half_line([](double x) { return std::exp(-x); });
  REQUIRE(r1.converged);
  CHECK_THAT(r1.value, Catch::Matchers::WithinAbs(1.0, 1e-11));

  // Gamma(5) = 24
  auto r2 = quad::integrate_half_line(
      [](double x) { return std::pow(x, 4.0) * std::exp(-x); });
  REQUIRE(r2.converged);
  CHECK_THAT(r2.value, Catch::Matchers::WithinRel(24.0, 1e-10));

  // shifted: int_2^inf e^{-x} = e^{-2}
  auto r3 = quad::integrate_from([](double x) { return std::exp(-x); }, 2.0);
  REQUIRE(r3.converged);
  CHECK_THAT(r3.value, Catch::Matchers::WithinRel(std::exp(-2.0), 1e-10));
}

TEST_CASE("evaluation cap reports failure", "[quadrature]") {
  // Integrand with a hard singularity that cannot meet 1e-14 abs with few evals.
  quad::QuadOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-16;
  opts.max_evals = 200;
  auto r = quad::integrate([](double x) { return std::cos(37.0 * x * x); }, 0.0, 20.0, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.evals <= 230);
}
