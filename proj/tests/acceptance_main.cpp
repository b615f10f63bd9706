// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion states its measured metric against the pinned
// tolerance.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "mqed/constants.hpp"
#include "mqed/dynamics.hpp"
#include "mqed/greens.hpp"
#include "mqed/kernels.hpp"
#include "mqed/oracle.hpp"
#include "mqed/quadrature.hpp"
#include "mqed/trig_integrals.hpp"
#include "mqed/weak_coupling.hpp"

using namespace mqed;
using units::kCoulomb;
using units::kHbarC;
using units::kPi;

namespace {

int g_failures = 0;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  }
};

void report(int criterion, const char* name, bool pass, double metric,
            double tol, double seconds) {
  std::printf("[%s] criterion %d: %s (metric=%.3e, tol=%.3e, %.1fs)\n",
              pass ? "PASS" : "FAIL", criterion, name, metric, tol, seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Emitter z_dipole(const Vec3& pos, double omega = 3.525, double mu_d = 10.0) {
  return Emitter::from_debye(pos, omega, {0.0, 0.0, mu_d});
}

const Environment kDrude = DrudeHalfSpace{5.0, 0.1};

double max_population_deviation(const Trajectory& a, const Trajectory& b) {
  double dev = 0.0;
  const std::size_t n = std::min(a.times.size(), b.times.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = 0; e < a.n_emitters(); ++e)
      dev = std::max(dev, std::abs(a.population(e, i) - b.population(e, i)));
  }
  return dev;
}

double max_total_deviation(const Trajectory& a, const Trajectory& b) {
  double dev = 0.0;
  const std::size_t n = std::min(a.times.size(), b.times.size());
  for (std::size_t i = 0; i < n; ++i)
    dev = std::max(dev,
                   std::abs(a.total_population(i) - b.total_population(i)));
  return dev;
}

// mean spacing of the interior local maxima of y(t), peak positions refined
// by parabolic interpolation
double mean_peak_spacing(const std::vector<double>& t,
                         const std::vector<double>& y) {
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
      const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
      double shift = 0.0;
      if (denom != 0.0)
        shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
      peaks.push_back(t[i] + shift * (t[i] - t[i - 1]));
    }
  }
  if (peaks.size() < 2) return 0.0;
  return (peaks.back() - peaks.front()) / (peaks.size() - 1);
}

struct DensityGrid {
  std::vector<SpectralDensity> items;
  int n = 0;
  const SpectralDensity& at(int a, int b) const {
    if (a > b) std::swap(a, b);
    return items[static_cast<std::size_t>(a) * n + b];
  }
};

DensityGrid tabulate(const std::vector<Emitter>& emitters,
                     const FrequencyGrid& grid, const Environment& env,
                     Part part) {
  DensityGrid set;
  set.n = static_cast<int>(emitters.size());
  set.items.resize(static_cast<std::size_t>(set.n) * set.n);
  TabulationOptions topt;
  topt.refine_rel_tol = 1e-4;
  topt.jobs = 4;
  for (int a = 0; a < set.n; ++a)
    for (int b = a; b < set.n; ++b)
      set.items[static_cast<std::size_t>(a) * set.n + b] = spectral_density(
          emitters[a], emitters[b], a, b, grid, env, part, topt);
  return set;
}

std::vector<KernelTable> kernels_for(const SystemConfig& cfg,
                                     const DensityGrid& set) {
  std::vector<double> omegas;
  for (const auto& e : cfg.emitters) omegas.push_back(e.omega);
  KernelBuildOptions ko;
  ko.dt = cfg.time.dt;
  ko.tau_max = cfg.resolved_tau_max();
  ko.rwa = cfg.rwa;
  return build_kernels(
      omegas,
      [&](int a, int b) -> const SpectralDensity& { return set.at(a, b); },
      ko);
}

// ---------------------------------------------------------------------------

void criterion_1() {
  Stopwatch sw;
  Emitter a = z_dipole({0, 0, 5});
  Emitter b = z_dipole({27.99, 0, 5});  // kR = 0.5
  SystemConfig cfg;
  cfg.emitters = {a, b};
  cfg.environment = Vacuum{};
  cfg.method = Method::Maqd;
  cfg.frequency = {0.0, 35.0, 100};
  const auto rep = build_weak_coupling_report(cfg.emitters, Vacuum{});
  const double gamma = rep.gamma[0];
  cfg.time = {5.0 / gamma, 5.0 / gamma / 1999.0, 1};
  const Trajectory traj = solve_maqd(cfg, rep);
  const auto ana =
      analytic_pair_populations(gamma, rep.v_ddi()(0, 1), traj.times);
  double err = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    err = std::max(err, std::abs(traj.population(0, i) - ana.donor[i]));
    err = std::max(err, std::abs(traj.population(1, i) - ana.acceptor[i]));
    err = std::max(err, std::abs(traj.total_population(i) - ana.total[i]));
  }
  const double sec = sw.seconds();
  report(1, "MAQD equals the closed-form pair solution",
         err < 1e-9 && sec < 1.0, err, 1e-9, sec);
}

void criterion_2() {
  Stopwatch sw;
  Emitter a = z_dipole({0, 0, 5});
  Emitter b = z_dipole({27.99, 0, 5});  // kR = 0.5, hGamma0/homega ~ 1.3e-7
  SystemConfig cfg;
  cfg.emitters = {a, b};
  cfg.environment = Vacuum{};
  cfg.rwa = false;
  cfg.frequency = {0.0, 35.0, 100};
  const auto rep = build_weak_coupling_report(cfg.emitters, Vacuum{});
  const double gamma = rep.gamma[0];
  cfg.time = {3.0 / gamma, 3.0 / gamma / 4000.0, 1};
  const MarkovTerms mt = free_space_markov_terms(cfg.emitters, false);
  const Trajectory fqd = solve_fqd(cfg, mt, {});
  const Trajectory maqd = solve_maqd(cfg, rep);
  const double dev = max_population_deviation(fqd, maqd);
  const double sec = sw.seconds();
  report(2, "Markov-limit FQD/MAQD consistency (vacuum pair)",
         dev < 1e-2 && sec < 60.0, dev, 1e-2, sec);
}

void criterion_3() {
  Stopwatch sw;
  const double rdist = 2.0;
  const double w = 0.01 * kHbarC / rdist;  // omega R / c = 0.01
  Emitter a = z_dipole({0, 0, 5}, w);
  Emitter b = z_dipole({rdist, 0, 5}, w);
  const Complex vddi = v_rddi(a, b, Vacuum{});  // V_ORC = 0 on resonance
  const double qc = v_qc(a, b, Vacuum{});
  const double ratio = vddi.real() / (vddi.real() + qc);
  const double coulomb =
      kCoulomb * a.dipole.squaredNorm() / (rdist * rdist * rdist);
  const double cerr = std::abs(vddi.real() - coulomb) / coulomb;
  const double sec = sw.seconds();
  const bool pass =
      std::abs(ratio - 2.0) < 0.02 && cerr < 5e-3 && sec < 1.0;
  report(3, "RWA halving of the near-field DDI", pass,
         std::abs(ratio - 2.0), 0.02, sec);
}

void criterion_4() {
  Stopwatch sw;
  // identical on-resonant pair at equal heights over the Drude surface, in
  // the near-field regime (d much below both the wavelength and the image
  // distance 2h) where the factor-2 frequency doubling is clean and the
  // surface coupling is weak enough for 1e-3 total-population invariance
  Emitter a = z_dipole({0, 0, 40});
  Emitter b = z_dipole({2, 0, 40});
  SystemConfig cfg;
  cfg.emitters = {a, b};
  cfg.environment = kDrude;
  // J^Sc at h = 12 nm is concentrated in the SPP band; the tighter support
  // keeps the counter-rotating kernel phases resolvable at this dt
  cfg.frequency = {0.0, 12.0, 1200};
  cfg.time = {2000.0, 0.02, 1};
  cfg.tau_max = 240.0;
  cfg.tol.kernel_tail = 1e-5;

  // MAQD: totals identical to 1e-12 (Im V equal, algebraic)
  const auto rep = build_weak_coupling_report(cfg.emitters, kDrude);
  SystemConfig mcfg = cfg;
  mcfg.time.dt = cfg.time.t_max / 4000.0;
  mcfg.rwa = false;
  const Trajectory m_norwa = solve_maqd(mcfg, rep);
  mcfg.rwa = true;
  const Trajectory m_rwa = solve_maqd(mcfg, rep);
  const double m_dev = max_total_deviation(m_norwa, m_rwa);

  // FQD: totals agree within 1e-3, P_D oscillation frequency doubles
  const DensityGrid set = tabulate(cfg.emitters, cfg.frequency, kDrude,
                                   Part::Scattering);
  cfg.rwa = false;
  const Trajectory f_norwa =
      solve_fqd(cfg, free_space_markov_terms(cfg.emitters, false),
                kernels_for(cfg, set));
  cfg.rwa = true;
  const Trajectory f_rwa =
      solve_fqd(cfg, free_space_markov_terms(cfg.emitters, true),
                kernels_for(cfg, set));
  const double f_dev = max_total_deviation(f_norwa, f_rwa);

  auto ratio_series = [](const Trajectory& t) {
    std::vector<double> r(t.times.size());
    for (std::size_t i = 0; i < t.times.size(); ++i)
      r[i] = t.population(0, i) / std::max(1e-300, t.total_population(i));
    return r;
  };
  const double spacing_norwa =
      mean_peak_spacing(f_norwa.times, ratio_series(f_norwa));
  const double spacing_rwa =
      mean_peak_spacing(f_rwa.times, ratio_series(f_rwa));
  const double freq_ratio = spacing_rwa / spacing_norwa;

  const double sec = sw.seconds();
  const bool pass = m_dev < 1e-12 && f_dev < 1e-3 &&
                    std::abs(freq_ratio - 2.0) < 0.1 && sec < 120.0;
  std::printf("    [detail] MAQD total dev=%.2e, FQD total dev=%.2e, "
              "oscillation ratio=%.3f\n",
              m_dev, f_dev, freq_ratio);
  report(4, "total-population RWA invariance in weak coupling", pass, f_dev,
         1e-3, sec);
}

void criterion_5() {
  Stopwatch sw;
  // fig3-strong geometry: h = 1 nm, d = 1 nm
  Emitter a = z_dipole({0, 0, 1});
  Emitter b = z_dipole({1, 0, 1});
  SystemConfig cfg;
  cfg.emitters = {a, b};
  cfg.environment = kDrude;
  cfg.frequency = {0.0, 35.0, 1500};
  cfg.time = {150.0, 0.005, 1};
  cfg.tau_max = 150.0;
  cfg.tol.kernel_tail = 1e-5;

  const DensityGrid set = tabulate(cfg.emitters, cfg.frequency, kDrude,
                                   Part::Scattering);
  cfg.rwa = false;
  const Trajectory f_norwa =
      solve_fqd(cfg, free_space_markov_terms(cfg.emitters, false),
                kernels_for(cfg, set));
  cfg.rwa = true;
  const Trajectory f_rwa =
      solve_fqd(cfg, free_space_markov_terms(cfg.emitters, true),
                kernels_for(cfg, set));

  const auto rep = build_weak_coupling_report(cfg.emitters, kDrude);
  SystemConfig mcfg = cfg;
  mcfg.rwa = false;
  const Trajectory maqd = solve_maqd(mcfg, rep);

  const double fqd_vs_maqd = max_population_deviation(f_norwa, maqd);
  const double rwa_totals = max_total_deviation(f_norwa, f_rwa);
  const double sec = sw.seconds();
  const bool pass = fqd_vs_maqd > 0.05 && rwa_totals > 0.01 && sec < 600.0;
  std::printf("    [detail] FQD-MAQD dev=%.3f, RWA total dev=%.3f\n",
              fqd_vs_maqd, rwa_totals);
  report(5, "strong-coupling FQD/MAQD and RWA divergence", pass, fqd_vs_maqd,
         0.05, sec);
}

void criterion_6() {
  Stopwatch sw;
  // shared-bath Lorentzian pair, cos^2-tapered support [0, 10]; the
  // narrow linewidth makes the bath discretization the dominant error for
  // every M in the sweep, so the monotone convergence sits above the FQD
  // solver floor
  const double g = 0.07905694150420949, lam = 0.05, wc = 5.0;
  const double margin = 1.5;
  auto j_of = [&](double w) {
    if (w <= 0.0 || w >= 10.0) return 0.0;
    const double d = w - wc;
    double j = g * g / kPi * lam / (d * d + lam * lam);
    const double edge = std::min(w, 10.0 - w);
    if (edge < margin) {
      const double c = std::cos(0.5 * kPi * (1.0 - edge / margin));
      j *= c * c;
    }
    return j;
  };
  SpectralDensity sd;
  for (double w = 0.0; w <= 10.0 + 1e-9; w += lam / 160.0) {
    sd.omega.push_back(w);
    sd.value.push_back(j_of(w));
  }

  SystemConfig cfg;
  cfg.emitters = {Emitter::from_debye({0, 0, 1}, wc, {0, 0, 10}),
                  Emitter::from_debye({5, 0, 1}, wc, {0, 0, 10})};
  cfg.environment = Vacuum{};
  cfg.rwa = false;
  cfg.frequency = {0.0, 10.0, 100};
  cfg.time = {25.0, 0.002, 1};
  cfg.tau_max = 25.0;
  cfg.tol.kernel_tail = 1e-5;

  std::vector<double> omegas = {wc, wc};
  KernelBuildOptions ko;
  ko.dt = cfg.time.dt;
  ko.tau_max = cfg.tau_max;
  ko.rwa = false;
  const auto kernels = build_kernels(
      omegas, [&](int, int) -> const SpectralDensity& { return sd; }, ko);
  MarkovTerms mt;
  mt.gamma0 = Eigen::VectorXd::Zero(2);
  mt.v0 = Eigen::MatrixXcd::Zero(2, 2);
  const Trajectory fqd = solve_fqd(cfg, mt, kernels);

  auto jm = [&](double w) {
    const double j = sd.interpolate(w);
    Eigen::MatrixXd m(2, 2);
    m << j, j, j, j;
    return m;
  };
  std::vector<double> devs;
  double norm_drift = 0.0;
  for (int m : {100, 200, 400, 800}) {
    const auto model =
        build_pseudomodes(omegas, jm, cfg.frequency, m, false);
    const auto run = solve_oracle_monitored(model, cfg);
    norm_drift = std::max(norm_drift, run.max_norm_drift);
    devs.push_back(max_population_deviation(run.trajectory, fqd));
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < devs.size(); ++i)
    if (!(devs[i + 1] < devs[i])) monotone = false;
  const double sec = sw.seconds();
  const bool pass =
      devs.back() < 1e-3 && monotone && norm_drift < 1e-10 && sec < 300.0;
  std::printf("    [detail] deviations M=100..800: %.2e %.2e %.2e %.2e, "
              "norm drift=%.1e\n",
              devs[0], devs[1], devs[2], devs[3], norm_drift);
  report(6, "pseudomode oracle equivalence (Lorentzian pair, no RWA)", pass,
         devs.back(), 1e-3, sec);
}

void criterion_7() {
  Stopwatch sw;
  double max_rel = 0.0, max_id = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double xp = std::pow(10.0, -3.0 + 6.0 * k / 49.0);
    const auto [ci_v, si_v] = trig_integrals(xp);
    const double bracket = ci_v * std::sin(xp) - si_v * std::cos(xp);
    const double i1 = -xp * bracket + 1.0;
    const double i2 = -ci_v * std::cos(xp) - si_v * std::sin(xp);
    const double i3 = bracket / xp;
    // direct quadrature of the defining integrals int x^n e^{-x}/(x^2+x'^2)
    quad::Options qo;
    qo.rel_tol = 1e-12;
    qo.abs_tol = 1e-300;
    qo.max_intervals = 4000;
    std::vector<double> pts{0.0, std::min(xp, 60.0), 10.0, 60.0,
                            60.0 + 2.0 * xp};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto q = [&](int n) {
      return quad::integrate(
                 [&](double x) {
                   return std::pow(x, n) * std::exp(-x) /
                          (x * x + xp * xp);
                 },
                 pts, qo)
          .value;
    };
    max_rel = std::max(max_rel, std::abs(i1 - q(2)) / std::abs(q(2)));
    max_rel = std::max(max_rel, std::abs(i2 - q(1)) / std::abs(q(1)));
    max_rel = std::max(max_rel, std::abs(i3 - q(0)) / std::abs(q(0)));
    max_id = std::max(max_id, std::abs(i1 + xp * xp * i3 - 1.0));
  }
  // imaginary-axis vs real-axis I in free space
  Emitter a = z_dipole({0, 0, 5});
  Emitter b = z_dipole({4, 0, 5});
  double axis_rel = 0.0;
  for (double wp : {0.5, 3.525, 20.0}) {
    const double ii =
        integral_I(a, b, wp, Vacuum{}, Part::Free, IntegralRoute::ImagAxis);
    const double ir =
        integral_I(a, b, wp, Vacuum{}, Part::Free, IntegralRoute::RealAxis);
    axis_rel = std::max(axis_rel, std::abs(ii - ir) / std::abs(ii));
  }
  const double sec = sw.seconds();
  const bool pass =
      max_rel < 1e-8 && max_id < 1e-12 && axis_rel < 1e-6 && sec < 10.0;
  std::printf("    [detail] closed-form rel=%.2e, identity=%.2e, "
              "axis cross-check=%.2e\n",
              max_rel, max_id, axis_rel);
  report(7, "trigonometric-integral closed forms and axis cross-check",
         pass, max_rel, 1e-8, sec);
}

void criterion_8() {
  Stopwatch sw;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uxy(-10.0, 10.0);
  std::uniform_real_distribution<double> uz(0.5, 12.0);
  std::uniform_real_distribution<double> uw(0.5, 6.0);
  double recip = 0.0, schwarz = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec3 r1(uxy(rng), uxy(rng), uz(rng));
    const Vec3 r2(uxy(rng), uxy(rng), uz(rng));
    const double w = uw(rng);
    const Mat3c g0_12 = free_space_gf(r1, r2, w);
    const Mat3c g0_21 = free_space_gf(r2, r1, w);
    recip = std::max(recip,
                     (g0_12 - g0_21.transpose()).norm() / g0_12.norm());
    if (k % 10 == 0) {
      const Mat3c gs_12 = half_space_scattering_gf(r1, r2, w, kDrude);
      const Mat3c gs_21 = half_space_scattering_gf(r2, r1, w, kDrude);
      recip = std::max(recip,
                       (gs_12 - gs_21.transpose()).norm() / gs_12.norm());
      const Mat3c gs_m = half_space_scattering_gf(r1, r2, -w, kDrude);
      schwarz = std::max(
          schwarz, (gs_m - gs_12.conjugate()).norm() / gs_12.norm());
    }
    const Mat3c g0_m = free_space_gf(r1, r2, -w);
    schwarz = std::max(schwarz,
                       (g0_m - g0_12.conjugate()).norm() / g0_12.norm());
  }
  // vacuum Gamma0 formula
  Emitter e = z_dipole({0, 0, 1});
  const double gamma = decay_rate(e, Vacuum{});
  const double closed = 4.0 / 3.0 * std::pow(e.omega, 3) *
                        e.dipole.squaredNorm() * kCoulomb /
                        std::pow(kHbarC, 3);
  const double gerr = std::abs(gamma - closed) / closed;
  // quasi-static image limit at omega h/c = 1e-2
  const double h = 10.0;
  const double w = 1e-2 * kHbarC / h;
  const Complex eps = environment_permittivity(kDrude, w);
  const Vec3 r(0, 0, h);
  const Mat3c gsc = half_space_scattering_gf(r, r, w, kDrude);
  const double k0 = w / kHbarC;
  const Complex image = (eps - 1.0) / (eps + 1.0) /
                        (16.0 * kPi * h * h * h);
  const double qerr =
      std::abs(k0 * k0 * gsc(2, 2) - image) / std::abs(image);
  const double sec = sw.seconds();
  const bool pass = recip < 1e-10 && schwarz < 1e-10 && gerr < 1e-10 &&
                    qerr < 1e-2 && sec < 60.0;
  std::printf("    [detail] reciprocity=%.1e, schwarz=%.1e, Gamma0=%.1e, "
              "image=%.2e\n",
              recip, schwarz, gerr, qerr);
  report(8, "Green's-function invariants", pass,
         std::max(std::max(recip, schwarz), gerr), 1e-10, sec);
}

void criterion_9() {
  Stopwatch sw;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(5.0, 60.0);
  std::uniform_real_distribution<double> uw(1.0, 5.0);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  double worst = 1e300;
  for (int k = 0; k < 100; ++k) {
    const double rdist = ur(rng);
    const double w = uw(rng);
    Vec3 mu(ud(rng), ud(rng), ud(rng));
    if (mu.norm() < 0.1) mu = Vec3(0, 0, 1);
    mu *= 10.0 / mu.norm();
    SystemConfig cfg;
    cfg.emitters = {Emitter::from_debye({0, 0, 5}, w, mu),
                    Emitter::from_debye({rdist, 0, 5}, w, mu)};
    cfg.environment = Vacuum{};
    cfg.frequency = {0.0, 35.0, 100};
    const auto rep = build_weak_coupling_report(cfg.emitters, Vacuum{});
    const double gamma = rep.gamma[0];
    cfg.time = {4.0 / gamma, 4.0 / gamma / 200.0, 1};
    const Trajectory traj = solve_maqd(cfg, rep);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double bound =
          std::exp(-gamma * traj.times[i]) * (1.0 - 1e-9);
      worst = std::min(worst, traj.total_population(i) - bound);
    }
  }
  const double sec = sw.seconds();
  const bool pass = worst >= 0.0 && sec < 60.0;
  report(9, "subradiance bound over random pair geometries", pass, worst,
         0.0, sec);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
