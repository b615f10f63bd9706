#include "mqed/trig_integrals.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "mqed/errors.hpp"

namespace mqed {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kPiHalf = 1.57079632679489661923132169;

// E1(z) by the modified Lentz continued fraction; valid away from the
// negative real axis, used here on z = i*x with x >= 8.
std::complex<double> e1_continued_fraction(std::complex<double> z) {
  const double tiny = 1e-300;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 400; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

}  // namespace

TrigIntegralPair trig_integrals(double x) {
  if (!(x > 0.0))
    throw ValidationError("NonPositiveArgument",
                          "trig_integrals requires x > 0");
  if (x < 8.0) {
    // Ci(x) = gamma + ln x + sum_{k>=1} (-x^2)^k / (2k (2k)!)
    // Si(x) = sum_{k>=0} (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    const double x2 = -x * x;
    double term_c = 1.0;   // running (-x^2)^k / (2k)!
    double sum_c = 0.0;
    double term_s = x;     // running (-1)^k x^{2k+1} / (2k+1)!
    double sum_s = x;
    for (int k = 1; k <= 60; ++k) {
      term_c *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
      sum_c += term_c / (2.0 * k);
      term_s *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
      sum_s += term_s / (2.0 * k + 1.0);
      if (std::abs(term_c) < 1e-18 * (1.0 + std::abs(sum_c)) &&
          std::abs(term_s) < 1e-18 * (1.0 + std::abs(sum_s)))
        break;
    }
    return {kEulerGamma + std::log(x) + sum_c, sum_s - kPiHalf};
  }
  // E1(ix) = -ci(x) + i si(x)
  const std::complex<double> e1 = e1_continued_fraction({0.0, x});
  return {-e1.real(), e1.imag()};
}

double cosint(double x) { return trig_integrals(x).ci; }
double sinint_shifted(double x) { return trig_integrals(x).si; }

}  // namespace mqed
