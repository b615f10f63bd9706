#include "mqed/model.hpp"

#include <cmath>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"

namespace mqed {

Emitter Emitter::from_debye(const Vec3& pos_nm, double omega_ev,
                            const Vec3& dipole_debye) {
  Emitter e;
  e.position = pos_nm;
  e.omega = omega_ev;
  e.dipole = dipole_debye * units::kDebye;
  return e;
}

Complex drude_permittivity(const DrudeHalfSpace& env, double omega) {
  if (omega <= 0.0)
    throw ValidationError("NonPositiveFrequency",
                          "drude_permittivity requires omega > 0");
  return 1.0 - env.omega_p * env.omega_p /
                   (omega * omega + kI * env.gamma * omega);
}

Complex environment_permittivity(const Environment& env, double omega) {
  if (is_vacuum(env)) return Complex(1.0, 0.0);
  if (omega == 0.0)
    throw ValidationError("NonPositiveFrequency",
                          "permittivity undefined at omega = 0");
  // evaluates the Drude formula for either sign of omega, so that
  // eps(-omega) = conj(eps(omega)) (Schwarz reflection)
  const auto& d = std::get<DrudeHalfSpace>(env);
  return 1.0 - d.omega_p * d.omega_p / (omega * omega + kI * d.gamma * omega);
}

double drude_permittivity_imag_axis(const DrudeHalfSpace& env, double kappa) {
  if (kappa <= 0.0)
    throw ValidationError("NonPositiveFrequency",
                          "imaginary-axis permittivity requires kappa > 0");
  return 1.0 + env.omega_p * env.omega_p / (kappa * kappa + env.gamma * kappa);
}

std::vector<Complex> SystemConfig::resolved_initial_amplitudes() const {
  if (!initial_amplitudes.empty()) return initial_amplitudes;
  std::vector<Complex> a(emitters.size(), Complex(0.0, 0.0));
  if (!a.empty()) a[0] = Complex(1.0, 0.0);
  return a;
}

double SystemConfig::resolved_tau_max() const {
  if (tau_max > 0.0) return tau_max;
  if (const auto* d = std::get_if<DrudeHalfSpace>(&environment)) {
    // the SPP linewidth gamma/2 sets the memory time of the kernels
    return std::min(time.t_max, 20.0 / d->gamma);
  }
  return time.t_max;
}

std::vector<std::string> check_config(const SystemConfig& config) {
  std::vector<std::string> v;
  if (config.emitters.empty()) v.push_back("emitters: NoEmitters: empty list");
  const bool half_space = !is_vacuum(config.environment);
  for (std::size_t i = 0; i < config.emitters.size(); ++i) {
    const auto& e = config.emitters[i];
    const std::string path = "emitters[" + std::to_string(i) + "]";
    if (!(e.omega > 0.0))
      v.push_back(path + ".omega: NonPositiveFrequency: must be > 0");
    if (!(e.dipole.norm() > 0.0))
      v.push_back(path + ".dipole: ZeroDipole: |dipole| must be > 0");
    if (half_space && !(e.position.z() > 0.0))
      v.push_back(path + ".position.z: EmitterBelowInterface: z must be > 0 "
                  "above a half-space");
  }
  if (const auto* d = std::get_if<DrudeHalfSpace>(&config.environment)) {
    if (!(d->omega_p > 0.0))
      v.push_back("environment.omega_p: NonPositiveFrequency: must be > 0");
    if (!(d->gamma > 0.0))
      v.push_back("environment.gamma: NonPositiveDamping: must be > 0 "
                  "(passivity)");
  }
  if (!config.initial_amplitudes.empty()) {
    if (config.initial_amplitudes.size() != config.emitters.size()) {
      v.push_back("initial_amplitudes: SizeMismatch: one amplitude per "
                  "emitter required");
    } else {
      double norm2 = 0.0;
      for (const auto& a : config.initial_amplitudes) norm2 += std::norm(a);
      if (std::abs(norm2 - 1.0) > 1e-9)
        v.push_back("initial_amplitudes: NonNormalizedInitialState: sum of "
                    "|C|^2 = " + std::to_string(norm2));
    }
  }
  if (!(config.time.dt > 0.0))
    v.push_back("time.dt: NonPositiveStep: dt must be > 0");
  if (!(config.time.t_max > 0.0))
    v.push_back("time.t_max: NonPositiveStep: t_max must be > 0");
  if (config.time.output_every < 1)
    v.push_back("time.output_every: NonPositiveStep: must be >= 1");
  if (config.frequency.n_points < 2)
    v.push_back("frequency.n_points: EmptyFrequencyGrid: need at least 2 "
                "points");
  if (config.frequency.omega_min < 0.0)
    v.push_back("frequency.omega_min: NegativeFrequency: must be >= 0");
  if (!(config.frequency.omega_max > config.frequency.omega_min))
    v.push_back("frequency.omega_max: EmptyFrequencyGrid: must exceed "
                "omega_min");
  if (config.tau_max < 0.0)
    v.push_back("tau_max: NonPositiveStep: must be >= 0");
  if (config.oracle.n_modes < 2 && config.method == Method::Oracle)
    v.push_back("oracle.n_modes: TooFewModes: need at least 2");
  return v;
}

SystemConfig validate_config(const SystemConfig& config) {
  auto v = check_config(config);
  if (!v.empty()) throw ValidationError(std::move(v));
  return config;
}

}  // namespace mqed
