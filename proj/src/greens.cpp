#include "mqed/greens.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"
#include "mqed/parallel.hpp"

namespace mqed {

namespace {

using units::kHbarC;
using units::kPi;

// outgoing-wave branch: Im k_z >= 0, and on the real axis the sign of
// Re k_z follows the sign of omega
Complex kz_branch(Complex z, double sgn_omega) {
  Complex w = std::sqrt(z);
  if (w.imag() < 0.0) w = -w;
  if (w.imag() == 0.0 && sgn_omega < 0.0) w = -w;
  return w;
}

struct BesselTriple {
  double j0, j1, j2;
};

BesselTriple bessel_j012(double x) {
  if (x == 0.0) return {1.0, 0.0, 0.0};
  return {std::cyl_bessel_j(0, x), std::cyl_bessel_j(1, x),
          std::cyl_bessel_j(2, x)};
}

// Reflected plane-wave dyad in the frame with the lateral separation along
// +x: s-polarization s(x)s(x) terms plus p-polarization p+ (x) p- terms,
// integrated over the azimuth (J0/J1/J2 form).
Mat3c reflection_bracket(Complex rp, Complex rs, double k_rho, Complex kz1,
                         Complex k1sq, double rho) {
  const auto [j0, j1, j2] = bessel_j012(k_rho * rho);
  Mat3c b = Mat3c::Zero();
  const Complex pfac = rp * (kz1 * kz1) / k1sq;
  b(0, 0) = rs * (j0 + j2) - pfac * (j0 - j2);
  b(1, 1) = rs * (j0 - j2) - pfac * (j0 + j2);
  b(2, 2) = rp * (2.0 * k_rho * k_rho / k1sq) * j0;
  b(0, 2) = -rp * (k_rho * kz1 / k1sq) * (2.0 * kI * j1);
  b(2, 0) = -b(0, 2);
  return b;
}

Mat3c rotate_to_lab(const Mat3c& g, double dx, double dy, double rho) {
  if (rho < 1e-14) return g;
  const double c = dx / rho;
  const double s = dy / rho;
  Mat3 q;
  q << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return q * g * q.transpose();
}

std::vector<double> merge_breakpoints(std::vector<double> pts, double lo,
                                      double hi) {
  pts.push_back(lo);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (p < lo || p > hi) continue;
    if (out.empty() || p > out.back() * (1.0 + 1e-14) + 1e-300) out.push_back(p);
  }
  if (out.size() < 2) out = {lo, hi};
  return out;
}

}  // namespace

Mat3c free_space_gf(const Vec3& r1, const Vec3& r2, double omega) {
  const Vec3 d = r1 - r2;
  const double rdist = d.norm();
  if (rdist <= 0.0)
    throw ValidationError("CoincidentPointsFullTensor",
                          "full free-space tensor diverges at r1 == r2; only "
                          "Im G0 is defined there");
  const Vec3 n = d / rdist;
  const double kr = omega / kHbarC * rdist;
  const Mat3 nn = n * n.transpose();
  const Mat3 trans = Mat3::Identity() - nn;
  const Mat3 longi = 3.0 * nn - Mat3::Identity();
  const Complex phase = std::exp(kI * kr) / (4.0 * kPi * rdist);
  const Complex near = 1.0 / (kr * kr) - kI / kr;
  return phase * (trans.cast<Complex>() + near * longi.cast<Complex>());
}

Mat3 free_space_gf_imag_axis(const Vec3& r1, const Vec3& r2, double kappa) {
  const Vec3 d = r1 - r2;
  const double rdist = d.norm();
  if (rdist <= 0.0 || kappa <= 0.0)
    throw ValidationError("CoincidentPointsFullTensor",
                          "imaginary-axis G0 requires r1 != r2 and kappa > 0");
  const Vec3 n = d / rdist;
  const double x = kappa / kHbarC * rdist;
  const Mat3 nn = n * n.transpose();
  const Mat3 trans = Mat3::Identity() - nn;
  const Mat3 longi = 3.0 * nn - Mat3::Identity();
  const double damp = std::exp(-x) / (4.0 * kPi * rdist);
  return damp * (trans - (1.0 / (x * x) + 1.0 / x) * longi);
}

Mat3 free_space_im_gf_coincident(double omega) {
  return (omega / kHbarC) / (6.0 * kPi) * Mat3::Identity();
}

std::pair<Complex, Complex> fresnel_coefficients(double k_rho, double omega,
                                                 const Environment& env) {
  if (k_rho < 0.0)
    throw ValidationError("NegativeWavenumber", "k_rho must be >= 0");
  if (is_vacuum(env)) return {Complex(0.0), Complex(0.0)};
  const Complex eps = environment_permittivity(env, omega);
  const double sgn = omega >= 0.0 ? 1.0 : -1.0;
  const double k1sq = (omega / kHbarC) * (omega / kHbarC);
  const Complex kz1 = kz_branch(Complex(k1sq - k_rho * k_rho, 0.0), sgn);
  const Complex kz2 = kz_branch(eps * k1sq - k_rho * k_rho, sgn);
  const Complex rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
  const Complex rs = (kz1 - kz2) / (kz1 + kz2);
  return {rp, rs};
}

Mat3c half_space_scattering_gf(const Vec3& r1, const Vec3& r2, double omega,
                               const Environment& env,
                               const SommerfeldOptions& opt) {
  if (is_vacuum(env)) return Mat3c::Zero();
  if (!(r1.z() > 0.0) || !(r2.z() > 0.0))
    throw ValidationError("EmitterBelowInterface",
                          "scattering Green's function requires z > 0");
  if (omega == 0.0)
    throw ValidationError("NonPositiveFrequency",
                          "scattering Green's function requires omega != 0");

  const double dx = r1.x() - r2.x();
  const double dy = r1.y() - r2.y();
  const double rho = std::hypot(dx, dy);
  const double bigz = r1.z() + r2.z();
  const double sgn = omega > 0.0 ? 1.0 : -1.0;
  const double ak1 = std::abs(omega) / kHbarC;
  const Complex k1sq(ak1 * ak1, 0.0);
  const Complex eps = environment_permittivity(env, omega);

  auto fresnel_at = [&](double k_rho, Complex kz1) {
    const Complex kz2 = kz_branch(eps * k1sq - k_rho * k_rho, sgn);
    const Complex rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
    const Complex rs = (kz1 - kz2) / (kz1 + kz2);
    return std::pair{rp, rs};
  };
  const Complex prefac = kI / (8.0 * kPi);

  quad::Options qopt;
  qopt.abs_tol = opt.abs_tol;
  qopt.rel_tol = opt.rel_tol;
  qopt.max_intervals = opt.max_intervals;

  // propagating sector: k_rho = |k1| sin(th), kz1 = sgn |k1| cos(th),
  // measure (k_rho/kz1) dk_rho = sgn |k1| sin(th) dth
  auto f_prop = [&](double th) -> Mat3c {
    const double k_rho = ak1 * std::sin(th);
    const Complex kz1(sgn * ak1 * std::cos(th), 0.0);
    const auto [rp, rs] = fresnel_at(k_rho, kz1);
    const Complex meas = sgn * ak1 * std::sin(th);
    return (prefac * meas * std::exp(kI * kz1 * bigz)) *
           reflection_bracket(rp, rs, k_rho, kz1, k1sq, rho);
  };
  const int n_prop = std::clamp(
      static_cast<int>(3 + ak1 * (rho + bigz) / kPi), 3, 64);
  std::vector<double> prop_pts;
  for (int i = 0; i <= n_prop; ++i)
    prop_pts.push_back(kPi / 2.0 * i / n_prop);
  auto ia = quad::integrate(f_prop, prop_pts, qopt);

  // evanescent sector: kz1 = i kappa, measure dk_rho (k_rho/kz1) = -i dkappa
  auto f_evan = [&](double kap) -> Mat3c {
    const double k_rho = std::hypot(ak1, kap);
    const Complex kz1(0.0, kap);
    const auto [rp, rs] = fresnel_at(k_rho, kz1);
    return (prefac * (-kI) * std::exp(-kap * bigz)) *
           reflection_bracket(rp, rs, k_rho, kz1, k1sq, rho);
  };
  const double kap_max = opt.tail_exponent / bigz + 10.0 * ak1;
  std::vector<double> evan_pts{0.0, std::min(ak1, kap_max), kap_max};
  // seed a panel edge near the surface-plasmon pole of r_p when present
  if (eps.real() < -1.0) {
    const Complex kspp = ak1 * std::sqrt(eps / (eps + 1.0));
    const Complex kap_p = std::sqrt(kspp * kspp - k1sq);
    if (kap_p.real() > 0.0) {
      for (double fct : {0.7, 0.95, 1.05, 1.4})
        evan_pts.push_back(fct * kap_p.real());
    }
  }
  if (rho > 0.0) {
    const double step = kPi / rho;
    const int n_osc = std::min(256, static_cast<int>(kap_max / step));
    for (int i = 1; i <= n_osc; ++i) evan_pts.push_back(i * step);
  }
  evan_pts = merge_breakpoints(std::move(evan_pts), 0.0, kap_max);
  auto ib = quad::integrate(f_evan, evan_pts, qopt);

  if (!ia.converged || !ib.converged)
    throw NumericalError(
        "QuadratureNotConverged",
        "Sommerfeld integral error " + std::to_string(ia.error + ib.error) +
            " exceeds tolerance (rel " + std::to_string(opt.rel_tol) + ")");
  return rotate_to_lab(ia.value + ib.value, dx, dy, rho);
}

Mat3 scattering_gf_imag_axis(const Vec3& r1, const Vec3& r2, double kappa,
                             const Environment& env,
                             const SommerfeldOptions& opt) {
  if (is_vacuum(env)) return Mat3::Zero();
  if (!(r1.z() > 0.0) || !(r2.z() > 0.0))
    throw ValidationError("EmitterBelowInterface",
                          "scattering Green's function requires z > 0");
  if (!(kappa > 0.0))
    throw ValidationError("NonPositiveFrequency",
                          "imaginary-axis evaluation requires kappa > 0");

  const double dx = r1.x() - r2.x();
  const double dy = r1.y() - r2.y();
  const double rho = std::hypot(dx, dy);
  const double bigz = r1.z() + r2.z();
  const double kt = kappa / kHbarC;
  const Complex k1sq(-kt * kt, 0.0);
  const double eps =
      drude_permittivity_imag_axis(std::get<DrudeHalfSpace>(env), kappa);

  const Complex prefac = kI / (8.0 * kPi);
  auto f = [&](double k_rho) -> Mat3c {
    const double s1 = std::hypot(kt, k_rho);
    const double s2 = std::sqrt(eps * kt * kt + k_rho * k_rho);
    const Complex kz1(0.0, s1);
    const Complex kz2(0.0, s2);
    const Complex rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
    const Complex rs = (kz1 - kz2) / (kz1 + kz2);
    const Complex meas = k_rho / kz1;
    return (prefac * meas * std::exp(-s1 * bigz)) *
           reflection_bracket(rp, rs, k_rho, kz1, k1sq, rho);
  };
  const double k_max = opt.tail_exponent / bigz + 10.0 * kt;
  std::vector<double> pts{0.0, std::min(kt, k_max), k_max};
  if (rho > 0.0) {
    const double step = kPi / rho;
    const int n_osc = std::min(256, static_cast<int>(k_max / step));
    for (int i = 1; i <= n_osc; ++i) pts.push_back(i * step);
  }
  pts = merge_breakpoints(std::move(pts), 0.0, k_max);

  quad::Options qopt;
  qopt.abs_tol = opt.abs_tol;
  qopt.rel_tol = opt.rel_tol;
  qopt.max_intervals = opt.max_intervals;
  auto res = quad::integrate(f, pts, qopt);
  if (!res.converged)
    throw NumericalError("QuadratureNotConverged",
                         "imaginary-axis Sommerfeld integral error " +
                             std::to_string(res.error) + " above tolerance");
  const Mat3c lab = rotate_to_lab(res.value, dx, dy, rho);
  return lab.real();
}

Mat3c total_gf(const Vec3& r1, const Vec3& r2, double omega,
               const Environment& env, const SommerfeldOptions& opt) {
  return free_space_gf(r1, r2, omega) +
         half_space_scattering_gf(r1, r2, omega, env, opt);
}

double coupling_scale(double omega) {
  return 4.0 * kPi * units::kCoulomb * omega * omega / (kHbarC * kHbarC);
}

double spectral_density_value(const Emitter& a, const Emitter& b, double omega,
                              const Environment& env, Part part,
                              const SommerfeldOptions& opt) {
  if (omega <= 0.0) return 0.0;
  const bool coincident = (a.position - b.position).norm() < 1e-14;
  Mat3 im_g = Mat3::Zero();
  if (part == Part::Free || part == Part::Total) {
    im_g += coincident
                ? free_space_im_gf_coincident(omega)
                : Mat3(free_space_gf(a.position, b.position, omega).imag());
  }
  if ((part == Part::Scattering || part == Part::Total) && !is_vacuum(env)) {
    im_g += Mat3(
        half_space_scattering_gf(a.position, b.position, omega, env, opt)
            .imag());
  }
  return contract(omega, a.dipole, im_g, b.dipole) / kPi;
}

double SpectralDensity::interpolate(double w) const {
  if (omega.empty() || w <= omega.front() || w >= omega.back()) {
    if (!omega.empty() && w == omega.front()) return value.front();
    if (!omega.empty() && w == omega.back()) return value.back();
    return 0.0;
  }
  const auto it = std::upper_bound(omega.begin(), omega.end(), w);
  const std::size_t i = static_cast<std::size_t>(it - omega.begin());
  const double t = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
  return (1.0 - t) * value[i - 1] + t * value[i];
}

SpectralDensity spectral_density(const Emitter& a, const Emitter& b, int row,
                                 int col, const FrequencyGrid& grid,
                                 const Environment& env, Part part,
                                 const TabulationOptions& opt) {
  if (grid.n_points < 2 || !(grid.omega_max > grid.omega_min))
    throw ValidationError("EmptyFrequencyGrid",
                          "spectral density grid needs at least 2 ascending "
                          "points");
  SpectralDensity sd;
  sd.row = row;
  sd.col = col;
  sd.part = part;
  sd.omega.resize(grid.n_points);
  const double h =
      (grid.omega_max - grid.omega_min) / (grid.n_points - 1);
  for (int i = 0; i < grid.n_points; ++i)
    sd.omega[i] = grid.omega_min + h * i;
  sd.value.assign(sd.omega.size(), 0.0);

  const bool trivial_zero =
      (part == Part::Scattering) && is_vacuum(env);
  auto eval = [&](double w) {
    return trivial_zero
               ? 0.0
               : spectral_density_value(a, b, w, env, part, opt.sommerfeld);
  };
  parallel_for(sd.omega.size(), opt.jobs,
               [&](std::size_t i) { sd.value[i] = eval(sd.omega[i]); });
  if (trivial_zero) return sd;

  // midpoint refinement: insert nodes where linear interpolation misses
  const std::size_t max_points = sd.omega.size() * opt.max_points_factor;
  for (int round = 0; round < opt.max_refine_rounds; ++round) {
    double jmax = 0.0;
    for (double v : sd.value) jmax = std::max(jmax, std::abs(v));
    if (jmax == 0.0) break;
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < sd.omega.size(); ++i)
      mids.push_back(0.5 * (sd.omega[i] + sd.omega[i + 1]));
    std::vector<double> jmid(mids.size());
    parallel_for(mids.size(), opt.jobs,
                 [&](std::size_t i) { jmid[i] = eval(mids[i]); });
    std::vector<double> new_omega, new_value;
    bool inserted = false;
    for (std::size_t i = 0; i + 1 < sd.omega.size(); ++i) {
      new_omega.push_back(sd.omega[i]);
      new_value.push_back(sd.value[i]);
      const double lin = 0.5 * (sd.value[i] + sd.value[i + 1]);
      if (std::abs(jmid[i] - lin) > opt.refine_rel_tol * jmax &&
          new_omega.size() + (sd.omega.size() - i) < max_points) {
        new_omega.push_back(mids[i]);
        new_value.push_back(jmid[i]);
        inserted = true;
      }
    }
    new_omega.push_back(sd.omega.back());
    new_value.push_back(sd.value.back());
    sd.omega = std::move(new_omega);
    sd.value = std::move(new_value);
    if (!inserted) break;
  }
  return sd;
}

}  // namespace mqed
