#pragma once

// Time propagation of the emitter amplitudes:
//  - solve_fqd: trapezoidal product-integration Volterra solver for the
//    non-Markovian working equations (free-space part Markovian, scattering
//    part via memory kernels), with and without the RWA;
//  - solve_maqd: fully Markov-approximated linear system (matrix exponential
//    for degenerate frequencies, adaptive RK otherwise);
//  - analytic_pair_populations: the closed-form identical-pair solution.

#include <functional>
#include <vector>

#include "mqed/kernels.hpp"
#include "mqed/model.hpp"
#include "mqed/weak_coupling.hpp"

namespace mqed {

// Full quantum dynamics. `markov` carries the free-space Gamma0 and V0
// couplings (already RWA-resolved); `kernels` the scattering-part memory
// kernels built for the same rwa setting and dt.
Trajectory solve_fqd(const SystemConfig& config, const MarkovTerms& markov,
                     const std::vector<KernelTable>& kernels);

// Markov-approximated dynamics from a weak-coupling report.
Trajectory solve_maqd(const SystemConfig& config,
                      const WeakCouplingReport& report);

struct PairPopulations {
  std::vector<double> donor;
  std::vector<double> acceptor;
  std::vector<double> total;
};

// P_D = e^{-G t} [sinh^2(Im V t) + cos^2(Re V t)]
// P_A = e^{-G t} [sinh^2(Im V t) + sin^2(Re V t)]
// P_tot = e^{-G t} cosh(2 Im V t)          (V in eV, hbar = 1)
PairPopulations analytic_pair_populations(double gamma, Complex v,
                                          const std::vector<double>& times);

struct ConvergenceReport {
  std::vector<int> factors;
  std::vector<double> deviations;  // successive max population deviations
  bool converging = false;
};

// Reruns the supplied solver at refined time steps (dt/f) and reports the
// maximum population deviation between successive refinements; throws
// NotConverging when the deviations fail to decrease.
ConvergenceReport convergence_sweep(
    const SystemConfig& config, const std::vector<int>& factors,
    const std::function<Trajectory(const SystemConfig&)>& runner);

}  // namespace mqed
