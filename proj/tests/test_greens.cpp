#include <doctest.h>

#include <cmath>
#include <random>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"
#include "mqed/greens.hpp"

using namespace mqed;
using units::kHbarC;
using units::kPi;

namespace {
const Environment kDrude = DrudeHalfSpace{5.0, 0.1};

Vec3 random_point_above(std::mt19937& rng, double zmin = 0.5) {
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  std::uniform_real_distribution<double> uz(zmin, zmin + 10.0);
  return {u(rng), u(rng), uz(rng)};
}
}  // namespace

TEST_CASE("coincident branch reproduces the vacuum decay-rate tensor") {
  // mu . Im G0(r,r,w) . mu = |mu|^2 w/(6 pi c), so Gamma0 = |mu|^2 w^3/(3 pi c^3)
  const double w = 3.525;
  const Vec3 mu = Vec3(0, 0, 10) * units::kDebye;
  const double x = 2.0 * contract(w, mu, free_space_im_gf_coincident(w), mu);
  const double gamma0 = 4.0 / 3.0 * w * w * w * mu.squaredNorm() *
                        units::kCoulomb / (kHbarC * kHbarC * kHbarC);
  CHECK(x == doctest::Approx(gamma0).epsilon(1e-12));
  // frozen external value: mu = 10 D, w = 3.525 eV -> 4.7440176544809322e-7 eV
  CHECK(x == doctest::Approx(4.7440176544809322e-7).epsilon(1e-10));
}

TEST_CASE("free-space tensor: reciprocity and Schwarz reflection") {
  std::mt19937 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Vec3 r1 = random_point_above(rng);
    const Vec3 r2 = random_point_above(rng);
    if ((r1 - r2).norm() < 0.5) continue;
    const double w = 0.5 + 0.35 * k;
    const Mat3c g12 = free_space_gf(r1, r2, w);
    const Mat3c g21 = free_space_gf(r2, r1, w);
    CHECK((g12 - g21.transpose()).norm() <= 1e-10 * g12.norm());
    const Mat3c gm = free_space_gf(r1, r2, -w);
    CHECK((gm - g12.conjugate()).norm() <= 1e-10 * g12.norm());
  }
}

TEST_CASE("near-field longitudinal dominance of G0") {
  // k R = 1e-3, z-dipoles with lateral separation: the (3nn - I)/(kR)^2 term
  // dominates, Re[(w/c)^2 G0_zz] -> -1/(4 pi R^3)
  const double rdist = 2.0;
  const double w = 1e-3 * kHbarC / rdist;
  const Mat3c g = free_space_gf({0, 0, 5}, {rdist, 0, 5}, w);
  const double k0 = w / kHbarC;
  const double lhs = (k0 * k0 * g(2, 2)).real();
  // oracle: Re k^2 G_zz = k^2 [cos(kR)(1 - 1/(kR)^2) - sin(kR)/(kR)]/(4 pi R)
  const double kr = k0 * rdist;
  const double series = k0 * k0 *
                        (std::cos(kr) * (1.0 - 1.0 / (kr * kr)) -
                         std::sin(kr) / kr) /
                        (4.0 * kPi * rdist);
  CHECK(lhs == doctest::Approx(series).epsilon(1e-12));
  CHECK(lhs == doctest::Approx(-1.0 / (4.0 * kPi * rdist * rdist * rdist))
                   .epsilon(2e-6));
}

TEST_CASE("fresnel coefficients: vacuum, quasi-static limit, SPP pole") {
  CHECK(fresnel_coefficients(0.01, 3.0, Vacuum{}).first == Complex(0.0));
  const double w = 3.0;
  const Complex eps = environment_permittivity(kDrude, w);
  // k_rho -> infinity: r_p -> (eps-1)/(eps+1)
  const auto [rp_inf, rs_inf] = fresnel_coefficients(1e3, w, kDrude);
  const Complex qs = (eps - 1.0) / (eps + 1.0);
  CHECK(std::abs(rp_inf - qs) < 1e-4 * std::abs(qs));
  CHECK(std::abs(rs_inf) < 1e-4);
  // |r_p| on the real axis peaks near Re k_spp = Re k0 sqrt(eps/(eps+1))
  const double k0 = w / kHbarC;
  const Complex kspp = k0 * std::sqrt(eps / (eps + 1.0));
  double best_k = 0.0, best = 0.0;
  for (double k = 1.001 * k0; k < 3.0 * k0; k += 0.001 * k0) {
    const double v = std::abs(fresnel_coefficients(k, w, kDrude).first);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  CHECK(best_k == doctest::Approx(kspp.real()).epsilon(0.05));
}

TEST_CASE("scattering tensor: vacuum gives zero, reciprocity, Schwarz") {
  CHECK(half_space_scattering_gf({0, 0, 1}, {1, 0, 1}, 3.0, Vacuum{}).norm() ==
        0.0);
  std::mt19937 rng(11);
  for (int k = 0; k < 8; ++k) {
    const Vec3 r1 = random_point_above(rng);
    const Vec3 r2 = random_point_above(rng);
    const double w = 1.0 + 0.5 * k;
    const Mat3c g12 = half_space_scattering_gf(r1, r2, w, kDrude);
    const Mat3c g21 = half_space_scattering_gf(r2, r1, w, kDrude);
    CHECK((g12 - g21.transpose()).norm() <= 1e-10 * g12.norm());
    const Mat3c gm = half_space_scattering_gf(r1, r2, -w, kDrude);
    CHECK((gm - g12.conjugate()).norm() <= 1e-10 * g12.norm());
  }
}

TEST_CASE("quasi-static image-dipole limit of G_Sc,zz") {
  // (w/c)^2 G_Sc,zz(r,r) -> (eps-1)/(eps+1) / (16 pi h^3) as wh/c -> 0
  const double h = 10.0;
  const double w = 1e-2 * kHbarC / h;
  const Complex eps = environment_permittivity(kDrude, w);
  const Vec3 r(0, 0, h);
  const Mat3c g = half_space_scattering_gf(r, r, w, kDrude);
  const double k0 = w / kHbarC;
  const Complex lhs = k0 * k0 * g(2, 2);
  const Complex image = (eps - 1.0) / (eps + 1.0) / (16.0 * kPi * h * h * h);
  CHECK(std::abs(lhs - image) / std::abs(image) < 1e-2);
}

TEST_CASE("perfect-mirror limit matches image theory for all components") {
  // enormous omega_p: eps -> large negative, r_p -> 1, r_s -> -1; the
  // reflected field is the image dipole with (-px, -py, +pz)
  const Environment pec = DrudeHalfSpace{5e3, 1e-3};
  const Vec3 r1(6.0, -1.0, 8.0), r2(0.0, -1.0, 5.0);
  const double w = 3.0;
  const Mat3c gsc = half_space_scattering_gf(r1, r2, w, pec);
  const Vec3 r2_img(r2.x(), r2.y(), -r2.z());
  Mat3 mirror;
  mirror << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  const Mat3c gimg = free_space_gf(r1, r2_img, w) * mirror.cast<Complex>();
  CHECK((gsc - gimg).norm() / gimg.norm() < 2e-3);
}

TEST_CASE("imaginary-axis scattering tensor is real and consistent") {
  // Schwarz reflection makes G(i kappa) real; check decay in kappa and
  // agreement with the small-kappa quasi-static image value
  const double h = 5.0;
  const Vec3 r(0, 0, h);
  const double kap = 1e-2 * kHbarC / (2.0 * h);
  const Mat3 g = scattering_gf_imag_axis(r, r, kap, kDrude);
  const double eps = drude_permittivity_imag_axis(
      std::get<DrudeHalfSpace>(kDrude), kap);
  const double image = (eps - 1.0) / (eps + 1.0) / (16.0 * kPi * h * h * h);
  const double kt = kap / kHbarC;
  CHECK(kt * kt * g(2, 2) == doctest::Approx(image).epsilon(2e-2));
  CHECK(scattering_gf_imag_axis(r, r, 50.0, kDrude).norm() <
        scattering_gf_imag_axis(r, r, 5.0, kDrude).norm());
}

TEST_CASE("asymptotic vanishing of the two-point free-space tensor") {
  // |(w/c)^2 G| stays bounded and the 1/(kR)^2 near-field terms die off;
  // along the imaginary axis the tensor vanishes outright
  const Vec3 r1(0, 0, 1), r2(3, 0, 1);
  double prev = 1e300;
  for (double kap : {10.0, 30.0, 90.0, 270.0}) {
    const double norm = free_space_gf_imag_axis(r1, r2, kap).norm() * kap *
                        kap / (kHbarC * kHbarC);
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("spectral density: vacuum diagonal equals Gamma0/(2 pi)") {
  Emitter e = Emitter::from_debye({0, 0, 1}, 3.525, {0, 0, 10});
  const double j = spectral_density_value(e, e, e.omega, Vacuum{},
                                          Part::Total);
  CHECK(2.0 * kPi * j == doctest::Approx(4.7440176544809322e-7).epsilon(1e-10));
}

TEST_CASE("spectral density tabulation: symmetry, positivity, SPP peak") {
  Emitter a = Emitter::from_debye({0, 0, 10}, 3.525, {0, 0, 10});
  Emitter b = Emitter::from_debye({4, 0, 10}, 3.525, {0, 0, 10});
  FrequencyGrid grid{2.0, 5.0, 61};
  TabulationOptions topt;
  topt.refine_rel_tol = 1e-3;
  const auto jaa =
      spectral_density(a, a, 0, 0, grid, kDrude, Part::Scattering, topt);
  const auto jab =
      spectral_density(a, b, 0, 1, grid, kDrude, Part::Scattering, topt);
  const auto jba =
      spectral_density(b, a, 1, 0, grid, kDrude, Part::Scattering, topt);
  double peak_w = 0.0, peak = -1.0;
  for (std::size_t i = 0; i < jaa.omega.size(); ++i) {
    CHECK(jaa.value[i] >= -1e-16);
    if (jaa.value[i] > peak) {
      peak = jaa.value[i];
      peak_w = jaa.omega[i];
    }
  }
  // diagonal peaks near the SPP frequency omega_p/sqrt(2)
  CHECK(peak_w == doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(0.03));
  // reciprocity of the cross density
  for (std::size_t i = 0; i < jab.omega.size(); ++i)
    CHECK(jab.interpolate(jab.omega[i]) ==
          doctest::Approx(jba.interpolate(jab.omega[i])).epsilon(1e-9));
  // refinement actually added points near the peak
  CHECK(jaa.omega.size() > 61);
}

TEST_CASE("scattering part in vacuum tabulates to exactly zero") {
  Emitter a = Emitter::from_debye({0, 0, 1}, 3.525, {0, 0, 10});
  FrequencyGrid grid{0.0, 10.0, 16};
  const auto j = spectral_density(a, a, 0, 0, grid, Vacuum{},
                                  Part::Scattering);
  for (double v : j.value) CHECK(v == 0.0);
}

TEST_CASE("full tensor at coincident points is rejected") {
  CHECK_THROWS_AS(free_space_gf({1, 2, 3}, {1, 2, 3}, 2.0), ValidationError);
}

TEST_CASE("sommerfeld quadrature convergence under tolerance tightening") {
  const Vec3 r1(0, 0, 2), r2(1.5, 0.5, 1.0);
  SommerfeldOptions loose;
  loose.rel_tol = 1e-6;
  SommerfeldOptions tight;
  tight.rel_tol = 1e-11;
  const Mat3c gl = half_space_scattering_gf(r1, r2, 3.4, kDrude, loose);
  const Mat3c gt = half_space_scattering_gf(r1, r2, 3.4, kDrude, tight);
  CHECK((gl - gt).norm() <= 1e-6 * gt.norm());
}
