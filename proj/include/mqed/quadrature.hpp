#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature over finite intervals,
// templated on the integrand value type (double, Complex, Eigen matrices).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mqed/errors.hpp"
#include "mqed/types.hpp"

namespace mqed::quad {

namespace detail {

// QUADPACK 15-point Kronrod abscissae (positive half) and weights,
// with the embedded 7-point Gauss rule on the odd-indexed nodes.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Complex& x) { return std::abs(x); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

}  // namespace detail

template <typename T>
struct Result {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// One G7/K15 panel on [a, b]; returns the K15 value and |K15 - G7| error.
template <typename F, typename T = std::invoke_result_t<F, double>>
Result<T> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T resk = detail::kWgk[7] * fc;
  T resg = detail::kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * detail::kXgk[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    T sum = f1 + f2;
    resk += detail::kWgk[j] * sum;
    if (j % 2 == 1) resg += detail::kWg[j / 2] * sum;
  }
  Result<T> r;
  r.value = h * resk;
  r.error = detail::magnitude(h * (resk - resg));
  r.evaluations = 15;
  return r;
}

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-8;
  std::size_t max_intervals = 4000;
  // when set, failure to converge throws QuadratureNotConverged instead of
  // returning converged = false
  bool throw_on_failure = false;
};

// Adaptive bisection over the initial panels defined by `points`
// (ascending breakpoints, at least two entries).
template <typename F, typename T = std::invoke_result_t<F, double>>
Result<T> integrate(F&& f, const std::vector<double>& points,
                    const Options& opt = {}) {
  struct Interval {
    double a, b, error;
    T value;
  };
  std::vector<Interval> ivs;
  Result<T> total;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto r = gk15(f, points[i], points[i + 1]);
    total.evaluations += r.evaluations;
    ivs.push_back({points[i], points[i + 1], r.error, r.value});
  }
  auto tol = [&](double scale) {
    return std::max(opt.abs_tol, opt.rel_tol * scale);
  };
  while (true) {
    T value = ivs.front().value;
    double error = ivs.front().error;
    for (std::size_t i = 1; i < ivs.size(); ++i) {
      value += ivs[i].value;
      error += ivs[i].error;
    }
    total.value = value;
    total.error = error;
    if (error <= tol(detail::magnitude(value))) {
      total.converged = true;
      return total;
    }
    if (ivs.size() >= opt.max_intervals) break;
    // split the interval with the largest error estimate
    std::size_t worst = 0;
    for (std::size_t i = 1; i < ivs.size(); ++i)
      if (ivs[i].error > ivs[worst].error) worst = i;
    const Interval w = ivs[worst];
    const double m = 0.5 * (w.a + w.b);
    if (!(m > w.a && m < w.b)) break;  // interval exhausted at double precision
    auto r1 = gk15(f, w.a, m);
    auto r2 = gk15(f, m, w.b);
    total.evaluations += r1.evaluations + r2.evaluations;
    ivs[worst] = {w.a, m, r1.error, r1.value};
    ivs.push_back({m, w.b, r2.error, r2.value});
  }
  total.converged = false;
  if (opt.throw_on_failure)
    throw NumericalError("QuadratureNotConverged",
                         "estimated error " + std::to_string(total.error) +
                             " above tolerance after " +
                             std::to_string(total.evaluations) +
                             " evaluations");
  return total;
}

template <typename F, typename T = std::invoke_result_t<F, double>>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

}  // namespace mqed::quad
