#include "mqed/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"

namespace mqed {

namespace {

using units::kPi;

// panel moments m0 = int_0^h e^{-i u tau} du, m1 = int_0^h u e^{-i u tau} du;
// closed forms with a series branch where h*tau is small
void panel_moments(double h, double tau, Complex eh, Complex& m0,
                   Complex& m1) {
  const double ht = h * tau;
  if (std::abs(ht) < 1e-4) {
    const Complex iht(0.0, ht);
    m0 = h * (1.0 - iht / 2.0 - ht * ht / 6.0 + iht * ht * ht / 24.0);
    m1 = h * h *
         (0.5 - iht / 3.0 - ht * ht / 8.0 + iht * ht * ht / 30.0);
    return;
  }
  const Complex itau(0.0, tau);
  m0 = (1.0 - eh) / itau;
  m1 = Complex(0.0, h) * eh / tau + m0 / itau;
}

}  // namespace

std::vector<Complex> oscillatory_transform(const SpectralDensity& density,
                                           double shift, double dt,
                                           std::size_t n_tau) {
  const auto& w = density.omega;
  const auto& j = density.value;
  std::vector<Complex> out(n_tau + 1, Complex(0.0));
  if (w.size() < 2) return out;

  bool all_zero = true;
  for (double v : j)
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) return out;

  const std::size_t np = w.size() - 1;
  // per-panel running phasors: ph = e^{-i(w0+shift) tau_j}, eh = e^{-i h tau_j}
  std::vector<Complex> ph(np), eh(np), ph_step(np), eh_step(np);
  for (std::size_t p = 0; p < np; ++p) {
    const double h = w[p + 1] - w[p];
    ph[p] = Complex(1.0);
    eh[p] = Complex(1.0);
    ph_step[p] = std::polar(1.0, -(w[p] + shift) * dt);
    eh_step[p] = std::polar(1.0, -h * dt);
  }
  for (std::size_t n = 0; n <= n_tau; ++n) {
    const double tau = n * dt;
    if (n > 0 && n % 512 == 0) {
      // resync phasors against accumulated roundoff
      for (std::size_t p = 0; p < np; ++p) {
        ph[p] = std::polar(1.0, -(w[p] + shift) * tau);
        eh[p] = std::polar(1.0, -(w[p + 1] - w[p]) * tau);
      }
    }
    Complex acc(0.0);
    for (std::size_t p = 0; p < np; ++p) {
      const double h = w[p + 1] - w[p];
      Complex m0, m1;
      panel_moments(h, tau, eh[p], m0, m1);
      acc += ph[p] * (j[p] * m0 + (j[p + 1] - j[p]) / h * m1);
      ph[p] *= ph_step[p];
      eh[p] *= eh_step[p];
    }
    out[n] = acc;
  }
  return out;
}

std::vector<KernelTable> build_kernels(
    const std::vector<double>& omegas,
    const std::function<const SpectralDensity&(int, int)>& density,
    const KernelBuildOptions& opt) {
  if (!(opt.dt > 0.0) || !(opt.tau_max > 0.0))
    throw ValidationError("NonPositiveStep",
                          "kernel build requires dt > 0 and tau_max > 0");
  const int n = static_cast<int>(omegas.size());
  const std::size_t n_tau =
      static_cast<std::size_t>(std::ceil(opt.tau_max / opt.dt));

  auto check_grid = [&](const SpectralDensity& sd) {
    if (sd.omega.size() < 2) return;
    double jmax = 0.0;
    for (double v : sd.value) jmax = std::max(jmax, std::abs(v));
    if (jmax == 0.0) return;
    const double h_limit = 2.0 * kPi * opt.nyquist_factor / opt.tau_max;
    for (std::size_t p = 0; p + 1 < sd.omega.size(); ++p) {
      const double h = sd.omega[p + 1] - sd.omega[p];
      const double jsig =
          std::max(std::abs(sd.value[p]), std::abs(sd.value[p + 1]));
      if (h > h_limit && jsig > opt.significance * jmax)
        throw NumericalError(
            "SpectralGridTooCoarse",
            "frequency panel width " + std::to_string(h) +
                " cannot resolve e^{-i w tau} out to tau_max = " +
                std::to_string(opt.tau_max) + " (limit " +
                std::to_string(h_limit) + ")");
    }
  };

  std::vector<KernelTable> tables;
  auto emit = [&](KernelKind kind, int row, int col,
                  const SpectralDensity& sd, double shift) {
    check_grid(sd);
    KernelTable t;
    t.kind = kind;
    t.row = row;
    t.col = col;
    t.dt = opt.dt;
    t.values = oscillatory_transform(sd, shift, opt.dt, n_tau);
    tables.push_back(std::move(t));
  };

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      emit(KernelKind::CoRotating, a, b, density(a, b), -omegas[a]);
  if (!opt.rwa) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        emit(KernelKind::CounterLocal, a, b, density(b, b), +omegas[b]);
        emit(KernelKind::CounterCross, a, b, density(b, a), +omegas[b]);
      }
    }
  }
  return tables;
}

double kernel_memory_bound(const KernelTable& table, double tol) {
  const auto& k = table.values;
  if (k.empty()) return 0.0;
  const std::size_t n = k.size();
  std::vector<double> mag(n);
  double total = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = std::abs(k[i]);
    peak = std::max(peak, mag[i]);
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    total += w * mag[i] * table.dt;
  }
  if (total == 0.0) return 0.0;
  // tail(j) = integral of |K| over [tau_j, tau_max]
  double tail = 0.5 * mag[n - 1] * table.dt;
  std::size_t j_trunc = n;  // sentinel: not found
  if (tail <= tol * total) j_trunc = n - 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    tail += 0.5 * (mag[i] + mag[i + 1]) * table.dt;
    if (tail <= tol * total) j_trunc = i;
  }
  if (j_trunc == n)
    throw NumericalError("NoDecayDetected",
                         "kernel tail mass exceeds tolerance even at "
                         "tau_max; enlarge tau_max or the frequency grid");
  return j_trunc * table.dt;
}

}  // namespace mqed
