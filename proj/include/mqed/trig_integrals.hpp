#pragma once

// Trigonometric integrals on the positive real axis:
//   ci(x) = -int_x^inf cos(t)/t dt   (the cosine integral Ci)
//   si(x) = -int_x^inf sin(t)/t dt = Si(x) - pi/2
// computed by power series for small x and by the continued fraction of
// E1(ix) otherwise; both branches accurate to ~1e-14 relative.

namespace mqed {

double cosint(double x);   // ci(x), x > 0
double sinint_shifted(double x);  // si(x) = Si(x) - pi/2, x > 0

struct TrigIntegralPair {
  double ci;
  double si;
};
TrigIntegralPair trig_integrals(double x);

}  // namespace mqed
