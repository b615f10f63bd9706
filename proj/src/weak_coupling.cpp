#include "mqed/weak_coupling.hpp"

#include <algorithm>
#include <cmath>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"
#include "mqed/trig_integrals.hpp"

namespace mqed {

namespace {

using units::kCoulomb;
using units::kHbarC;
using units::kPi;

double cutoff_omega(double omega_ref, const Environment& env,
                    const WeakCouplingOptions& opt) {
  if (opt.omega_cutoff > 0.0) return opt.omega_cutoff;
  double cut = 10.0 * omega_ref;
  if (const auto* d = std::get_if<DrudeHalfSpace>(&env))
    cut = std::max(cut, 5.0 * d->omega_p);
  return cut;
}

quad::Options quad_options(const WeakCouplingOptions& opt) {
  quad::Options q;
  q.abs_tol = opt.quad_abs;
  q.rel_tol = opt.quad_rel;
  q.max_intervals = 2000;
  return q;
}

// Abel-regularized free-space tail of the real-axis I integral: with
// x = w R/(hbar c) the integrand is
//   (C mu^2/(pi R^3)) [ (A x^2 + B) sin x - B x cos x ] / (x + x')
// whose tail beyond X splits into polynomial-in-x pieces with regularized
// antiderivatives plus ci/si terms:
//   int_X^inf x sin x = X cos X - sin X,  int_X^inf sin x = cos X,
//   int_X^inf cos x = -sin X,
//   int_X^inf sin x/(x+x') = -cos(x') si(X+x') + sin(x') ci(X+x'),
//   int_X^inf cos x/(x+x') = -cos(x') ci(X+x') - sin(x') si(X+x').
double free_space_tail(double a_coef, double b_coef, double xp, double x_cut) {
  const auto [ci_v, si_v] = trig_integrals(x_cut + xp);
  const double cx = std::cos(x_cut), sx = std::sin(x_cut);
  const double poly = a_coef * ((x_cut * cx - sx) - xp * cx) + b_coef * sx;
  const double isin = -std::cos(xp) * si_v + std::sin(xp) * ci_v;
  const double icos = -std::cos(xp) * ci_v - std::sin(xp) * si_v;
  return poly + (a_coef * xp * xp + b_coef) * isin + b_coef * xp * icos;
}

double integral_I_free_real_axis(const Vec3& mu1, const Vec3& mu2,
                                 const Vec3& d, double omega_prime,
                                 const WeakCouplingOptions& opt) {
  const double rdist = d.norm();
  if (rdist <= 0.0)
    throw ValidationError("CoincidentPointsFullTensor",
                          "free-space I diverges at coincident points (Lamb "
                          "shift, excluded)");
  const Vec3 n = d / rdist;
  const double a_coef = mu1.dot(mu2) - mu1.dot(n) * mu2.dot(n);
  const double b_coef = 3.0 * mu1.dot(n) * mu2.dot(n) - mu1.dot(mu2);
  const double xp = omega_prime * rdist / kHbarC;
  const double x_cut = std::max(30.0, 4.0 * xp);
  auto f = [&](double x) {
    return ((a_coef * x * x + b_coef) * std::sin(x) -
            b_coef * x * std::cos(x)) /
           (x + xp);
  };
  std::vector<double> pts;
  const int n_panels = std::max(8, static_cast<int>(x_cut / kPi));
  for (int i = 0; i <= n_panels; ++i) pts.push_back(x_cut * i / n_panels);
  auto res = quad::integrate(f, pts, quad_options(opt));
  const double body = res.value + free_space_tail(a_coef, b_coef, xp, x_cut);
  return kCoulomb / (kPi * rdist * rdist * rdist) * body;
}

// generic imaginary-axis route: I = -(w'/pi) int dk k^2 F(k)/(k^2+w'^2)
// with F built from Re G(i k); scale(k) already carries the k^2 factor.
double integral_I_imag_axis(const Emitter& a, const Emitter& b,
                            double omega_prime, const Environment& env,
                            Part part, const WeakCouplingOptions& opt) {
  const Vec3 d = a.position - b.position;
  const double rdist = d.norm();
  const bool coincident = rdist < 1e-14;
  if (coincident && part != Part::Scattering)
    throw ValidationError("CoincidentPointsFullTensor",
                          "only the scattering part of I is defined at "
                          "coincident points");
  double decay_scale = coincident ? (a.position.z() + b.position.z())
                                  : rdist;
  if (!is_vacuum(env))
    decay_scale = std::min(decay_scale, a.position.z() + b.position.z());
  const double kap_max = 60.0 * kHbarC / decay_scale + 10.0 * omega_prime;

  auto g_imag = [&](double kap) -> Mat3 {
    Mat3 g = Mat3::Zero();
    if (part == Part::Free || part == Part::Total)
      g += free_space_gf_imag_axis(a.position, b.position, kap);
    if ((part == Part::Scattering || part == Part::Total) && !is_vacuum(env))
      g += scattering_gf_imag_axis(a.position, b.position, kap, env,
                                   opt.sommerfeld);
    return g;
  };
  auto f = [&](double kap) {
    if (kap <= 0.0) return 0.0;
    return coupling_scale(kap) * a.dipole.dot(g_imag(kap) * b.dipole) /
           (kap * kap + omega_prime * omega_prime);
  };
  std::vector<double> pts{0.0, 0.5 * omega_prime, omega_prime,
                          5.0 * omega_prime, kap_max};
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  while (pts.size() > 1 && pts.back() > kap_max) pts.pop_back();
  if (pts.back() < kap_max) pts.push_back(kap_max);
  auto res = quad::integrate(f, pts, quad_options(opt));
  if (!res.converged)
    throw NumericalError("TailNotConverged",
                         "imaginary-axis I integral error " +
                             std::to_string(res.error));
  return -(omega_prime / kPi) * res.value;
}

double integral_I_scattering_real_axis(const Emitter& a, const Emitter& b,
                                       double omega_prime,
                                       const Environment& env,
                                       const WeakCouplingOptions& opt) {
  if (is_vacuum(env)) return 0.0;
  const double cut = cutoff_omega(std::max({omega_prime, a.omega, b.omega}),
                                  env, opt);
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    return spectral_density_value(a, b, w, env, Part::Scattering,
                                  opt.sommerfeld) /
           (w + omega_prime);
  };
  std::vector<double> pts{0.0, 0.5 * omega_prime, omega_prime, cut};
  if (const auto* drude = std::get_if<DrudeHalfSpace>(&env)) {
    const double spp = drude->omega_p / std::sqrt(2.0);
    pts.push_back(0.9 * spp);
    pts.push_back(spp);
    pts.push_back(1.1 * spp);
    pts.push_back(drude->omega_p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::remove_if(pts.begin(), pts.end(),
                           [&](double p) { return p < 0.0 || p > cut; }),
            pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::Options q = quad_options(opt);
  q.max_intervals = 600;  // each node is a Sommerfeld integral
  auto res = quad::integrate(f, pts, q);
  return res.value;
}

}  // namespace

double decay_rate(const Emitter& e, const Environment& env,
                  const WeakCouplingOptions& opt) {
  Mat3 im_g = free_space_im_gf_coincident(e.omega);
  if (!is_vacuum(env))
    im_g += Mat3(half_space_scattering_gf(e.position, e.position, e.omega,
                                          env, opt.sommerfeld)
                     .imag());
  return 2.0 * contract(e.omega, e.dipole, im_g, e.dipole);
}

ShiftResult energy_shift_scattering(const Emitter& e, const Environment& env,
                                    EmitterState state,
                                    const WeakCouplingOptions& opt) {
  if (is_vacuum(env)) return {0.0, 0.0};
  const double w0 = e.omega;
  if (state == EmitterState::Ground) {
    // no pole: plain integral, best evaluated on the imaginary axis
    const double i_val =
        integral_I(e, e, w0, env, Part::Scattering, opt.route, opt);
    return {-i_val, 0.0};
  }
  const double cut = cutoff_omega(w0, env, opt);
  if (!(w0 > 0.0) || !(w0 < cut))
    throw NumericalError("GridDoesNotEncloseResonance",
                         "pole at omega_alpha lies outside (0, cutoff)");
  auto j_sc = [&](double w) {
    return spectral_density_value(e, e, w, env, Part::Scattering,
                                  opt.sommerfeld);
  };
  const double j0 = j_sc(w0);
  const double dw = 1e-4 * w0;
  const double jslope = (j_sc(w0 + dw) - j_sc(w0 - dw)) / (2.0 * dw);
  // pole subtraction: PV int J/(w-w0) = int (J - J0)/(w - w0) + J0 ln((cut-w0)/w0)
  auto f = [&](double w) {
    if (w <= 0.0) return jslope * 0.0;
    const double d = w - w0;
    if (std::abs(d) < 1e-9 * w0) return jslope;
    return (j_sc(w) - j0) / d;
  };
  std::vector<double> pts{0.0, 0.5 * w0, 0.9 * w0, w0, 1.1 * w0, 2.0 * w0,
                          cut};
  if (const auto* drude = std::get_if<DrudeHalfSpace>(&env)) {
    const double spp = drude->omega_p / std::sqrt(2.0);
    for (double p : {0.9 * spp, spp, 1.1 * spp})
      if (p < cut) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::Options q = quad_options(opt);
  q.max_intervals = 600;
  auto res = quad::integrate(f, pts, q);
  const double pv = res.value + j0 * std::log((cut - w0) / w0);
  // tail budget: |J| decays like a power past the SPP band; estimate the
  // remainder from the envelope over the last octave
  double env_j = 0.0;
  for (double fct : {0.55, 0.7, 0.85, 1.0})
    env_j = std::max(env_j, std::abs(j_sc(fct * cut)));
  const double tail_budget = env_j * cut / (cut - w0);
  return {-pv, res.error + tail_budget};
}

Complex v_rddi(const Emitter& a, const Emitter& b, const Environment& env,
               const WeakCouplingOptions& opt) {
  Mat3c g = free_space_gf(a.position, b.position, b.omega);
  if (!is_vacuum(env))
    g += half_space_scattering_gf(a.position, b.position, b.omega, env,
                                  opt.sommerfeld);
  return -contract(b.omega, a.dipole, g, b.dipole);
}

double integral_I(const Emitter& a, const Emitter& b, double omega_prime,
                  const Environment& env, Part part, IntegralRoute route,
                  const WeakCouplingOptions& opt) {
  if (!(omega_prime > 0.0))
    throw ValidationError("NonPositiveFrequency", "I requires omega' > 0");
  if (route == IntegralRoute::Auto) route = IntegralRoute::ImagAxis;
  if (route == IntegralRoute::ImagAxis)
    return integral_I_imag_axis(a, b, omega_prime, env, part, opt);
  double val = 0.0;
  if (part == Part::Free || part == Part::Total)
    val += integral_I_free_real_axis(a.dipole, b.dipole,
                                     a.position - b.position, omega_prime,
                                     opt);
  if (part == Part::Scattering || part == Part::Total)
    val += integral_I_scattering_real_axis(a, b, omega_prime, env, opt);
  return val;
}

double free_space_I0(const Vec3& mu1, const Vec3& mu2, const Vec3& n_r,
                     double r_dist, double omega_prime) {
  if (!(r_dist > 0.0))
    throw ValidationError("CoincidentPointsFullTensor", "I0 requires R > 0");
  const double xp = omega_prime * r_dist / kHbarC;
  double i1, i2, i3;
  if (xp < 1e-7) {
    // series branch; the closed form is smooth but ci/si lose nothing here,
    // this guards the explicit 1/x' terms at extreme arguments
    const double lg = 0.57721566490153286 + std::log(xp);
    i1 = 1.0 - kPi / 2.0 * xp - xp * xp * (lg - 1.0);
    i2 = -lg + kPi / 2.0 * xp;
    i3 = kPi / (2.0 * xp) + lg - 1.0;
  } else {
    const auto [ci_v, si_v] = trig_integrals(xp);
    const double bracket = ci_v * std::sin(xp) - si_v * std::cos(xp);
    i1 = -xp * bracket + 1.0;
    i2 = -ci_v * std::cos(xp) - si_v * std::sin(xp);
    i3 = bracket / xp;
  }
  const double t_perp = mu1.dot(mu2) - mu1.dot(n_r) * mu2.dot(n_r);
  const double t_long = mu1.dot(mu2) - 3.0 * mu1.dot(n_r) * mu2.dot(n_r);
  return -(kCoulomb * omega_prime / (kPi * kHbarC * r_dist * r_dist)) *
         (t_perp * i1 + t_long * (i2 + i3));
}

double v_orc(const Emitter& a, const Emitter& b, const Environment& env,
             const WeakCouplingOptions& opt) {
  if (a.omega == b.omega) return 0.0;
  return integral_I(a, b, b.omega, env, Part::Total, opt.route, opt) -
         integral_I(a, b, a.omega, env, Part::Total, opt.route, opt);
}

double v_qc(const Emitter& a, const Emitter& b, const Environment& env,
            const WeakCouplingOptions& opt) {
  return integral_I(a, b, b.omega, env, Part::Total, opt.route, opt);
}

double short_distance_ddi(const Vec3& mu1, const Vec3& mu2, const Vec3& n_r,
                          double r_dist) {
  if (!(r_dist > 0.0))
    throw ValidationError("CoincidentPointsFullTensor",
                          "short-distance DDI requires R > 0");
  return kCoulomb *
         (mu1.dot(mu2) - 3.0 * mu1.dot(n_r) * mu2.dot(n_r)) /
         (r_dist * r_dist * r_dist);
}

WeakCouplingReport build_weak_coupling_report(
    const std::vector<Emitter>& emitters, const Environment& env,
    const WeakCouplingOptions& opt) {
  const int n = static_cast<int>(emitters.size());
  WeakCouplingReport rep;
  rep.gamma.resize(n);
  rep.shift_e.resize(n);
  rep.shift_g.resize(n);
  rep.v_rddi = Eigen::MatrixXcd::Zero(n, n);
  rep.v_orc = Eigen::MatrixXd::Zero(n, n);
  rep.v_qc = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    rep.gamma[i] = decay_rate(emitters[i], env, opt);
    rep.shift_e[i] =
        energy_shift_scattering(emitters[i], env, EmitterState::Excited, opt)
            .value;
    rep.shift_g[i] =
        energy_shift_scattering(emitters[i], env, EmitterState::Ground, opt)
            .value;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      rep.v_rddi(i, j) = v_rddi(emitters[i], emitters[j], env, opt);
      rep.v_orc(i, j) = v_orc(emitters[i], emitters[j], env, opt);
      rep.v_qc(i, j) = v_qc(emitters[i], emitters[j], env, opt);
    }
  }
  return rep;
}

MarkovTerms free_space_markov_terms(const std::vector<Emitter>& emitters,
                                    bool rwa, const WeakCouplingOptions& opt) {
  const int n = static_cast<int>(emitters.size());
  MarkovTerms mt;
  mt.gamma0.resize(n);
  mt.v0 = Eigen::MatrixXcd::Zero(n, n);
  Environment vac = Vacuum{};
  for (int i = 0; i < n; ++i)
    mt.gamma0(i) = decay_rate(emitters[i], vac, opt);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Emitter& a = emitters[i];
      const Emitter& b = emitters[j];
      const Vec3 d = a.position - b.position;
      const double rdist = d.norm();
      const Vec3 nr = d / rdist;
      const Complex rddi = -contract(
          b.omega, a.dipole, free_space_gf(a.position, b.position, b.omega),
          b.dipole);
      if (rwa) {
        mt.v0(i, j) = rddi + free_space_I0(a.dipole, b.dipole, nr, rdist,
                                           b.omega);
      } else {
        const double orc =
            (a.omega == b.omega)
                ? 0.0
                : free_space_I0(a.dipole, b.dipole, nr, rdist, b.omega) -
                      free_space_I0(a.dipole, b.dipole, nr, rdist, a.omega);
        mt.v0(i, j) = rddi + orc;
      }
    }
  }
  return mt;
}

}  // namespace mqed
