#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "overmeasure/error.hpp"
#include "overmeasure/gaussian.hpp"
#include "overmeasure/quadrature.hpp"

using namespace overmeasure;

TEST_CASE("closed-form integrals") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, kPi) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  // Endpoint singularity in the derivative forces real subdivision.
  const auto r = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(r.intervals > 1);
  CHECK(r.error <= 1e-10 * r.value);
}

TEST_CASE("gaussian density integrates to the cdf") {
  for (double x : {-3.0, -1.0, 0.5, 2.0}) {
    CAPTURE(x);
    const double v = integrate(std_normal_pdf, -12.0, x);
    CHECK(v == doctest::Approx(std_normal_cdf(x).value()).epsilon(1e-12));
  }
}

TEST_CASE("reversed and empty intervals") {
  const auto f = [](double x) { return x * x; };
  CHECK(integrate(f, 1.0, 0.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate(f, 2.0, 2.0) == 0.0);
}

TEST_CASE("absolute tolerance floor accepts tiny integrals") {
  QuadratureOptions options;
  options.abs_tol = 1e-20;
  const auto r = integrate_adaptive([](double x) { return 1e-30 * std::cos(x); }, 0.0, 1.0,
                                    options);
  CHECK(r.value == doctest::Approx(1e-30 * std::sin(1.0)).epsilon(1e-6));
}

TEST_CASE("errors") {
  const auto f = [](double x) { return x; };
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(integrate(f, 0.0, inf), Error);
  CHECK_THROWS_AS(integrate(f, 0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), Error);

  QuadratureOptions tight;
  tight.rel_tol = 1e-15;
  tight.max_evaluations = 200;
  try {
    integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, tight);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.code() == ErrorCode::convergence);
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_bound() > 0.0);
  }
}

TEST_CASE("property: polynomials up to degree 20 are exact on one panel") {
  testgen::Gen gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto degree = gen.count(0, 20);
    std::vector<double> c(degree + 1);
    for (double& v : c) v = gen.uniform(-1.0, 1.0);
    const double lo = gen.uniform(-2.0, 1.0);
    const double hi = lo + gen.uniform(0.1, 2.0);
    auto poly = [&](double x) {
      double y = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) y = y * x + *it;
      return y;
    };
    auto antiderivative = [&](double x) {
      double y = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) y = y * x + c[k] / static_cast<double>(k + 1);
      return y * x;
    };
    CAPTURE(degree);
    const double want = antiderivative(hi) - antiderivative(lo);
    const double got = integrate(poly, lo, hi, 1e-12);
    CHECK(std::abs(got - want) <= 1e-11 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("property: additivity over a split point") {
  testgen::Gen gen(22);
  const auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
  for (int trial = 0; trial < 100; ++trial) {
    const double a = gen.uniform(-4.0, 0.0);
    const double b = gen.uniform(a, 4.0);
    const double c = gen.uniform(b, 4.0);
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(c);
    const double whole = integrate(f, a, c, 1e-13);
    const double parts = integrate(f, a, b, 1e-13) + integrate(f, b, c, 1e-13);
    CHECK(std::abs(whole - parts) <= 1e-12);
  }
}
