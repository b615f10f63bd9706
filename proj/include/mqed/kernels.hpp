#pragma once

// Memory kernels of the non-Markovian amplitude equations, sampled on the
// solver time step:
//   co-rotating      K_{ab}(tau) = int dw J^Sc_{ab}(w) e^{-i(w - w_a) tau}
//   counter-rotating K_{ab}(tau) = int dw J^Sc_{ba}(w) e^{-i(w + w_b) tau}
// The residual phase e^{-i(w_b - w_a) t'} of the exact exponent algebra is
// not part of the kernel; the solver applies it inside the history sum.

#include <functional>
#include <vector>

#include "mqed/greens.hpp"
#include "mqed/model.hpp"

namespace mqed {

enum class KernelKind {
  CoRotating,    // acts on C_col with the residual detuning phase
  CounterLocal,  // J_{col,col} at coincident points, acts on C_row
  CounterCross,  // J_{col,row}, acts on C_col with the residual phase
};

struct KernelTable {
  KernelKind kind = KernelKind::CoRotating;
  int row = 0;  // alpha: the equation this kernel feeds
  int col = 0;  // beta: the emitter whose history it weights
  double dt = 0.0;
  std::vector<Complex> values;  // K(j*dt), j = 0..n

  bool is_zero() const {
    for (const auto& v : values)
      if (v != Complex(0.0)) return false;
    return true;
  }
};

// Filon-type transform of a linearly interpolated tabulated density against
// e^{-i(w + shift) tau} on tau = {0, dt, ..., n_tau*dt}; exact per panel for
// linear J, so wide panels in flat tails cost no accuracy.
std::vector<Complex> oscillatory_transform(const SpectralDensity& density,
                                           double shift, double dt,
                                           std::size_t n_tau);

struct KernelBuildOptions {
  double dt = 0.0;
  double tau_max = 0.0;
  bool rwa = false;
  // panels wider than 2*pi*nyquist_factor/tau_max where J is significant
  // trigger SpectralGridTooCoarse
  double nyquist_factor = 1.0;
  double significance = 1e-3;  // |J| fraction that makes a panel significant
};

// Builds the kernel set required by the amplitude equations for N emitters:
// co-rotating pairs (a,b) for all ordered pairs including a==b, and (unless
// rwa) the counter-rotating local and cross kernels for a != b.
// `density(i, j)` must return the tabulated scattering density J^Sc_{ij}.
std::vector<KernelTable> build_kernels(
    const std::vector<double>& omegas,
    const std::function<const SpectralDensity&(int, int)>& density,
    const KernelBuildOptions& opt);

// Smallest tau beyond which the remaining |K| mass is below tol of the
// total; 0 for an identically zero kernel. Throws NoDecayDetected when even
// full retention cannot meet the bound.
double kernel_memory_bound(const KernelTable& table, double tol);

}  // namespace mqed
