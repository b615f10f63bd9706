#include <doctest.h>

#include <cmath>

#include "mqed/quadrature.hpp"
#include "mqed/trig_integrals.hpp"

using namespace mqed;

namespace {
// independent oracle: E1(ix) = e^{-ix} int_0^inf e^{-t}/(t + ix) dt,
// so ci(x) = -Re E1(ix), si(x) = Im E1(ix)
TrigIntegralPair oracle(double x) {
  auto f = [&](double t) { return std::exp(-t) / Complex(t, x); };
  auto r = quad::integrate(f, {0.0, x, 10.0 + x, 80.0 + x});
  const Complex e1 = std::polar(1.0, -x) * r.value;
  return {-e1.real(), e1.imag()};
}
}  // namespace

TEST_CASE("frozen reference values") {
  // mpmath: ci(1), si(1) = Si(1) - pi/2
  auto p1 = trig_integrals(1.0);
  CHECK(p1.ci == doctest::Approx(0.33740392290096813).epsilon(1e-14));
  CHECK(p1.si == doctest::Approx(-0.6247132564277136).epsilon(1e-14));
  auto p8 = trig_integrals(8.0);
  CHECK(p8.ci == doctest::Approx(0.12243388253200956).epsilon(1e-13));
  CHECK(p8.si == doctest::Approx(0.0033904949120454329).epsilon(2e-11));
  auto p1000 = trig_integrals(1000.0);
  CHECK(p1000.ci == doctest::Approx(0.00082631551109068228).epsilon(1e-12));
  CHECK(p1000.si == doctest::Approx(-0.00056320482612540108).epsilon(1e-12));
}

TEST_CASE("series/continued-fraction crossover is seamless") {
  // straddles the x = 8 branch switch; frozen mpmath references
  auto lo = trig_integrals(7.9999999);
  CHECK(lo.ci == doctest::Approx(0.12243388435075937).epsilon(1e-12));
  CHECK(lo.si == doctest::Approx(0.0033904825450671818).epsilon(1e-10));
  auto hi = trig_integrals(8.0000001);
  CHECK(hi.ci == doctest::Approx(0.12243388071325853).epsilon(1e-12));
  CHECK(hi.si == doctest::Approx(0.0033905072790233474).epsilon(1e-10));
}

TEST_CASE("matches quadrature oracle across the range") {
  for (double x : {0.01, 0.3, 2.0, 4.0, 7.0, 8.5, 15.0, 40.0, 200.0}) {
    auto got = trig_integrals(x);
    auto want = oracle(x);
    CHECK(got.ci == doctest::Approx(want.ci).epsilon(1e-11));
    CHECK(got.si == doctest::Approx(want.si).epsilon(1e-11));
  }
}
