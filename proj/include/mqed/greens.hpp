#pragma once

// Dyadic Green's functions of the macroscopic Helmholtz operator for free
// space and a planar half-space (Fresnel/Sommerfeld form), plus the coupling
// spectral densities built from Im G.
//
// Conventions: omega is hbar*omega in eV, k0 = omega/(hbar c) in 1/nm, G in
// 1/nm. The half-space occupies z < 0; both field points must have z > 0.

#include <utility>
#include <vector>

#include "mqed/model.hpp"
#include "mqed/quadrature.hpp"
#include "mqed/types.hpp"

namespace mqed {

struct SommerfeldOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-9;
  std::size_t max_intervals = 1200;
  double tail_exponent = 40.0;  // truncate where exp(-kappa Z) < e^{-this}
};

// Free-space dyadic Green's function between distinct points, Eq. valid for
// any real omega != 0 (negative frequencies follow the Schwarz reflection).
// Throws CoincidentPointsFullTensor when r1 == r2.
Mat3c free_space_gf(const Vec3& r1, const Vec3& r2, double omega);

// Free-space G0 on the positive imaginary frequency axis (omega = i kappa);
// purely real there.
Mat3 free_space_gf_imag_axis(const Vec3& r1, const Vec3& r2, double kappa);

// Coincident-point branch: Im G0(r, r, omega) = k0/(6 pi) * I3. The real
// part (free-space Lamb shift) is excluded by design.
Mat3 free_space_im_gf_coincident(double omega);

// Fresnel reflection coefficients (r_p, r_s) of the lower half-space for
// lateral wavenumber k_rho (1/nm); total for all k_rho by branch choice
// Im k_z >= 0 (sign tied to sgn(omega) for propagating waves).
std::pair<Complex, Complex> fresnel_coefficients(double k_rho, double omega,
                                                 const Environment& env);

// Scattering (reflected) dyadic Green's function above the half-space as a
// Sommerfeld integral over reflected plane waves. Vacuum environments give
// exactly zero. Throws QuadratureNotConverged on tolerance failure.
Mat3c half_space_scattering_gf(const Vec3& r1, const Vec3& r2, double omega,
                               const Environment& env,
                               const SommerfeldOptions& opt = {});

// Scattering Green's function at omega = i kappa (real on the imaginary
// axis; the integrand decays like exp(-sqrt(kappa^2/c^2 + k_rho^2) Z)).
Mat3 scattering_gf_imag_axis(const Vec3& r1, const Vec3& r2, double kappa,
                             const Environment& env,
                             const SommerfeldOptions& opt = {});

Mat3c total_gf(const Vec3& r1, const Vec3& r2, double omega,
               const Environment& env, const SommerfeldOptions& opt = {});

// mu1 . M . mu2 scaled to an energy: 4 pi C omega^2 (mu1.M.mu2) / (hbar c)^2,
// with mu in e*nm and M in 1/nm; the building block of rates and couplings.
double coupling_scale(double omega);
inline double contract(double omega, const Vec3& mu1, const Mat3& m,
                       const Vec3& mu2) {
  return coupling_scale(omega) * mu1.dot(m * mu2);
}
inline Complex contract(double omega, const Vec3& mu1, const Mat3c& m,
                        const Vec3& mu2) {
  return coupling_scale(omega) * (mu1.transpose() * (m * mu2))(0);
}

enum class Part { Free, Scattering, Total };

// J_{ab}(omega) = omega^2/(pi hbar eps0 c^2) mu_a . Im G(r_a, r_b, omega) . mu_b
// in eV (hbar = 1); real for the real dipoles enforced at validation.
double spectral_density_value(const Emitter& a, const Emitter& b, double omega,
                              const Environment& env, Part part,
                              const SommerfeldOptions& opt = {});

// Sampled spectral density for one ordered emitter pair.
struct SpectralDensity {
  int row = 0;
  int col = 0;
  Part part = Part::Scattering;
  std::vector<double> omega;
  std::vector<double> value;

  double interpolate(double w) const;  // linear; 0 outside the grid
};

struct TabulationOptions {
  SommerfeldOptions sommerfeld;
  double refine_rel_tol = 1e-4;  // midpoint-vs-linear refinement target
  int max_refine_rounds = 10;
  std::size_t max_points_factor = 8;
  int jobs = 1;
};

// Tabulates J_{ab} on the configured grid with midpoint refinement near
// sharp features (the SPP peak). Grid points are strictly ascending.
SpectralDensity spectral_density(const Emitter& a, const Emitter& b, int row,
                                 int col, const FrequencyGrid& grid,
                                 const Environment& env, Part part,
                                 const TabulationOptions& opt = {});

}  // namespace mqed
