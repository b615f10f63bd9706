#pragma once

// Brute-force validator: discretizes the polariton continuum into
// pseudomodes with couplings sampled from the spectral-density matrix and
// propagates the truncated state vector
//   {|E_a, 0>} + {|G, 1_m>} (+ {|E_ab, 1_m>} without the RWA)
// with a fixed-step RK4 integrator, independent of the Volterra code path.

#include <functional>
#include <vector>

#include "mqed/greens.hpp"
#include "mqed/model.hpp"

namespace mqed {

struct PseudomodeModel {
  int n_emitters = 0;
  bool rwa = false;
  std::vector<double> emitter_omega;
  std::vector<double> mode_omega;          // one entry per retained mode
  Eigen::MatrixXd couplings;               // g[emitter][mode], real (eV)
  std::vector<std::pair<int, int>> pairs;  // (a < b) doubly-excited index map

  double delta_omega = 0.0;  // frequency spacing of the underlying grid
  std::size_t dimension() const {
    const std::size_t m = mode_omega.size();
    return n_emitters + m + (rwa ? 0 : pairs.size() * m);
  }
};

// Builds the pseudomode model on a uniform midpoint grid of `n_modes`
// frequencies over [omega_min, omega_max]; per-frequency couplings come
// from the eigendecomposition of the J matrix (PSD up to tolerance, else
// NonPSDSpectralMatrix). `j_matrix(w)` returns the N x N density slice.
PseudomodeModel build_pseudomodes(
    const std::vector<double>& emitter_omega,
    const std::function<Eigen::MatrixXd(double)>& j_matrix,
    const FrequencyGrid& grid, int n_modes, bool rwa,
    double psd_tol = 1e-10);

// Propagates the truncated Schroedinger equation. The recurrence horizon
// 2*pi/delta_omega bounds t_max (RecurrenceHorizonExceeded); the integrator
// step is dt/4. Returns interaction-picture emitter amplitudes.
Trajectory solve_oracle(const PseudomodeModel& model,
                        const SystemConfig& config);

// Total state norm (all sectors) as a function of time, for norm-drift
// monitoring; sampled every `stride` steps alongside solve_oracle.
struct OracleRun {
  Trajectory trajectory;
  double max_norm_drift = 0.0;          // max |norm - 1|
  double max_counter_population = 0.0;  // doubly-excited sector occupancy
};

OracleRun solve_oracle_monitored(const PseudomodeModel& model,
                                 const SystemConfig& config);

}  // namespace mqed
