#include <doctest.h>

#include <cmath>

#include "mqed/quadrature.hpp"

using namespace mqed;

TEST_CASE("gk15 integrates smooth functions") {
  auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0,
                           3.14159265358979323846);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("adaptive refinement handles sharp peaks") {
  // Lorentzian of width 1e-4 around 0.3
  const double w = 1e-4, x0 = 0.3;
  auto f = [&](double x) { return w / (w * w + (x - x0) * (x - x0)); };
  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.max_intervals = 2000;
  auto r = quad::integrate(f, 0.0, 1.0, opt);
  CHECK(r.converged);
  const double exact = std::atan((1.0 - x0) / w) + std::atan(x0 / w);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("complex-valued integrands") {
  auto f = [](double x) { return std::polar(1.0, 5.0 * x); };
  auto r = quad::integrate(f, 0.0, 2.0);
  CHECK(r.converged);
  const Complex exact = (std::polar(1.0, 10.0) - 1.0) / Complex(0.0, 5.0);
  CHECK(std::abs(r.value - exact) < 1e-12);
}

TEST_CASE("failure reporting") {
  // pathological: too few intervals allowed for an oscillatory integrand
  quad::Options opt;
  opt.rel_tol = 1e-14;
  opt.max_intervals = 2;
  opt.throw_on_failure = true;
  auto f = [](double x) { return std::sin(300.0 * x) * x; };
  CHECK_THROWS_AS(quad::integrate(f, 0.0, 50.0, opt), NumericalError);
}
