#pragma once

// Markov-regime quantities: decay rates, scattering energy shifts, and the
// dipole-dipole couplings V_RDDI / V_ORC / V_QC, with both real-axis and
// imaginary-axis evaluations of the shared integral
//   I(w') = int_0^inf dw J(w)/(w + w').
// All results are energies in eV (hbar = 1); rates are 1/time in the same
// unit.

#include <vector>

#include "mqed/greens.hpp"
#include "mqed/model.hpp"

namespace mqed {

enum class IntegralRoute { Auto, RealAxis, ImagAxis };

struct WeakCouplingOptions {
  SommerfeldOptions sommerfeld;
  double quad_abs = 1e-16;
  double quad_rel = 1e-9;
  double omega_cutoff = 0.0;  // 0 => max(10 w_alpha, 5 w_p)
  IntegralRoute route = IntegralRoute::Auto;
};

struct ShiftResult {
  double value = 0.0;   // eV
  double error = 0.0;   // quadrature + tail budget
};

// Gamma_alpha = 2 w^2/(hbar eps0 c^2) mu . Im G(r,r,w) . mu  >= 0
double decay_rate(const Emitter& e, const Environment& env,
                  const WeakCouplingOptions& opt = {});

enum class EmitterState { Excited, Ground };

// Casimir-Polder-type scattering shift; the excited state carries the
// principal-value pole at w_alpha (pole-subtraction quadrature), the ground
// state is a plain integral with denominator w + w_alpha. Zero in vacuum.
ShiftResult energy_shift_scattering(const Emitter& e, const Environment& env,
                                    EmitterState state,
                                    const WeakCouplingOptions& opt = {});

// V_RDDI = -(w_b^2/eps0 c^2) mu_a . G(r_a, r_b, w_b) . mu_b
Complex v_rddi(const Emitter& a, const Emitter& b, const Environment& env,
               const WeakCouplingOptions& opt = {});

// I(w') over the chosen Green's-function part between two emitters
// (coincident positions allowed for the scattering part only).
double integral_I(const Emitter& a, const Emitter& b, double omega_prime,
                  const Environment& env, Part part, IntegralRoute route,
                  const WeakCouplingOptions& opt = {});

// Free-space closed form of I (trigonometric-integral representation).
double free_space_I0(const Vec3& mu1, const Vec3& mu2, const Vec3& n_r,
                     double r_dist, double omega_prime);

// Off-resonance correction V_ORC = I(w_b) - I(w_a); zero when w_a == w_b.
double v_orc(const Emitter& a, const Emitter& b, const Environment& env,
             const WeakCouplingOptions& opt = {});

// RWA residual V_QC = I(w_b).
double v_qc(const Emitter& a, const Emitter& b, const Environment& env,
            const WeakCouplingOptions& opt = {});

// Non-retarded Coulomb dipole-dipole limit.
double short_distance_ddi(const Vec3& mu1, const Vec3& mu2, const Vec3& n_r,
                          double r_dist);

struct WeakCouplingReport {
  std::vector<double> gamma;    // per emitter
  std::vector<double> shift_e;  // Delta^Sc excited
  std::vector<double> shift_g;  // Delta^Sc ground
  Eigen::MatrixXcd v_rddi;      // ordered pairs, zero diagonal
  Eigen::MatrixXd v_orc;
  Eigen::MatrixXd v_qc;

  Eigen::MatrixXcd v_ddi() const {
    return v_rddi + v_orc.cast<Complex>();
  }
  Eigen::MatrixXcd v_ddi_rwa() const {
    return v_rddi + v_qc.cast<Complex>();
  }
};

WeakCouplingReport build_weak_coupling_report(
    const std::vector<Emitter>& emitters, const Environment& env,
    const WeakCouplingOptions& opt = {});

// Free-space Markovian coefficients of the FQD working equations:
// Gamma0 and V0_DDI (no RWA) or V0_DDI~ (RWA).
struct MarkovTerms {
  Eigen::VectorXd gamma0;  // free-space decay rates
  Eigen::MatrixXcd v0;     // free-space DDI couplings, zero diagonal
};

MarkovTerms free_space_markov_terms(const std::vector<Emitter>& emitters,
                                    bool rwa,
                                    const WeakCouplingOptions& opt = {});

}  // namespace mqed
