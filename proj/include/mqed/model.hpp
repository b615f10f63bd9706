#pragma once

// Physical data model: emitters, environments, simulation configuration.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mqed/types.hpp"

namespace mqed {

// Two-level emitter. `omega` is the transition energy hbar*omega in eV,
// `position` in nm, `dipole` the transition dipole vector in e*nm (real).
struct Emitter {
  Vec3 position = Vec3::Zero();
  double omega = 0.0;
  Vec3 dipole = Vec3::Zero();

  static Emitter from_debye(const Vec3& pos_nm, double omega_ev,
                            const Vec3& dipole_debye);
};

struct Vacuum {};

// Metallic half-space filling z < 0 with eps_D(w) = 1 - wp^2/(w^2 + i g w);
// the upper half-space z > 0 is vacuum.
struct DrudeHalfSpace {
  double omega_p = 5.0;  // eV
  double gamma = 0.1;    // eV
};

using Environment = std::variant<Vacuum, DrudeHalfSpace>;

inline bool is_vacuum(const Environment& env) {
  return std::holds_alternative<Vacuum>(env);
}

// Drude permittivity at real omega > 0. Throws NonPositiveFrequency.
Complex drude_permittivity(const DrudeHalfSpace& env, double omega);

// Permittivity of the lower half-space; 1 for vacuum environments.
Complex environment_permittivity(const Environment& env, double omega);

// Permittivity on the positive imaginary axis, omega = i*kappa; real and > 1
// for the Drude model.
double drude_permittivity_imag_axis(const DrudeHalfSpace& env, double kappa);

enum class Method { Fqd, Maqd, Oracle };

struct TimeGrid {
  double t_max = 0.0;  // internal time units (hbar/eV)
  double dt = 0.0;
  int output_every = 1;  // CSV row stride; solvers always step at dt
};

struct FrequencyGrid {
  double omega_min = 0.0;  // eV
  double omega_max = 0.0;
  int n_points = 0;
};

struct Tolerances {
  double quad_abs = 1e-12;     // absolute quadrature floor
  double quad_rel = 1e-8;      // relative quadrature target
  double tabulation_rel = 1e-4;  // spectral-density refinement target
  double kernel_tail = 1e-6;   // memory-truncation tail fraction
  double step = 1e-4;          // predictor/corrector residual bound
};

struct OracleOptions {
  int n_modes = 400;
};

struct SystemConfig {
  std::vector<Emitter> emitters;
  Environment environment = Vacuum{};
  std::vector<Complex> initial_amplitudes;  // empty => first emitter excited
  Method method = Method::Fqd;
  bool rwa = false;
  TimeGrid time;
  FrequencyGrid frequency;
  double tau_max = 0.0;  // memory extent; 0 => default
  Tolerances tol;
  OracleOptions oracle;

  std::vector<Complex> resolved_initial_amplitudes() const;
  // min(t_max, 20/gamma_drude) unless overridden; t_max in vacuum.
  double resolved_tau_max() const;
};

// Checks every type invariant; returns the list of violations (empty if the
// config is valid).
std::vector<std::string> check_config(const SystemConfig& config);

// Returns the config unchanged iff valid; otherwise throws ValidationError
// carrying one entry per violated invariant. Idempotent.
SystemConfig validate_config(const SystemConfig& config);

// Time series of interaction-picture amplitudes and derived populations.
struct Trajectory {
  std::vector<double> times;
  // amplitudes[e][i] = C_e(times[i])
  std::vector<std::vector<Complex>> amplitudes;

  std::size_t n_emitters() const { return amplitudes.size(); }
  double population(std::size_t emitter, std::size_t i) const {
    return std::norm(amplitudes[emitter][i]);
  }
  double total_population(std::size_t i) const {
    double p = 0.0;
    for (const auto& a : amplitudes) p += std::norm(a[i]);
    return p;
  }
};

}  // namespace mqed
