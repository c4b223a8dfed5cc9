#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "driftbound/quadrature.hpp"

using namespace driftbound;

TEST_CASE("simpson on smooth integrands") {
  CHECK(quad::simpson([](double x) { return x * x * x; }, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(quad::simpson([](double x) { return std::exp(-x); }, 0.0, 10.0) ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-9));
  CHECK(quad::simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(quad::simpson([](double) { return 1.0; }, 3.0, 3.0) == 0.0);
}

TEST_CASE("gauss-kronrod meets its absolute tolerance") {
  const double v = quad::gauss_kronrod([](double x) { return std::exp(0.5 * x * x); }, 0.0, 3.0, 1e-10);
  // Reference: series sum of x^(2k+1) / (2^k k! (2k+1)).
  double ref = 0.0, term = 3.0;
  for (int k = 0; k < 80; ++k) {
    ref += term / (2 * k + 1);
    term *= 9.0 / (2.0 * (k + 1));
  }
  CHECK(std::abs(v - ref) < 1e-10);
  CHECK(std::abs(quad::gauss_kronrod([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10) - 2.0 / 3.0) < 1e-9);
}

TEST_CASE("tail integrals") {
  const auto conv = quad::integrate_to_infinity([](double t) { return std::exp(-t); }, 0.0);
  CHECK(conv.converged);
  CHECK(conv.value == doctest::Approx(1.0).epsilon(1e-7));
  const auto div = quad::integrate_to_infinity([](double t) { return 1.0 / (1.0 + t); }, 0.0);
  CHECK_FALSE(div.converged);
  CHECK(std::isinf(div.value));
}

TEST_CASE("cumulative integral windows") {
  const auto f = [](double t) { return std::cos(t); };
  const quad::CumulativeIntegral table(f, 0.0, 10.0, 100);
  CHECK(table.at(0.0) == 0.0);
  CHECK(table.at(3.3) == doctest::Approx(std::sin(3.3)).epsilon(1e-9));
  CHECK(table.between(2.05, 7.77) == doctest::Approx(std::sin(7.77) - std::sin(2.05)).epsilon(1e-8));
}
