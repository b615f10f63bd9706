#include <doctest.h>

#include <cmath>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"
#include "mqed/oracle.hpp"

using namespace mqed;
using units::kPi;

namespace {

SystemConfig oracle_config(int n_emitters, double omega, double t_max,
                           double dt) {
  SystemConfig c;
  for (int i = 0; i < n_emitters; ++i)
    c.emitters.push_back(
        Emitter::from_debye({5.0 * i, 0, 1}, omega, {0, 0, 10}));
  c.environment = Vacuum{};
  c.time = {t_max, dt, 1};
  c.frequency = {0.0, 10.0, 100};
  c.method = Method::Oracle;
  return c;
}

}  // namespace

TEST_CASE("single-emitter couplings are sqrt(J dw)") {
  auto jm = [](double w) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 0.3 + 0.01 * w;
    return m;
  };
  FrequencyGrid grid{0.0, 10.0, 0};
  const auto model = build_pseudomodes({5.0}, jm, grid, 10, true);
  CHECK(model.mode_omega.size() == 10);
  const double dw = 1.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double wj = model.mode_omega[j];
    CHECK(std::abs(model.couplings(0, j)) ==
          doctest::Approx(std::sqrt((0.3 + 0.01 * wj) * dw)).epsilon(1e-12));
  }
  // RWA basis: N + M; no-RWA single emitter has no pair sector
  CHECK(model.dimension() == 11);
}

TEST_CASE("identical-pair J matrix factorization is PSD with rank 1") {
  auto jm = [](double w) {
    const double j = 0.2 + 0.02 * w;
    Eigen::MatrixXd m(2, 2);
    m << j, j, j, j;  // shared bath: rank-1 slice
    return m;
  };
  FrequencyGrid grid{0.0, 8.0, 0};
  const auto model = build_pseudomodes({4.0, 4.0}, jm, grid, 16, false);
  // one retained mode per frequency (null eigenvalue dropped)
  CHECK(model.mode_omega.size() == 16);
  CHECK(model.pairs.size() == 1);
  CHECK(model.dimension() == 2 + 16 + 16);
}

TEST_CASE("non-PSD spectral matrix trips the cross-module guard") {
  auto jm = [](double) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
    return m;
  };
  FrequencyGrid grid{0.0, 8.0, 0};
  CHECK_THROWS_AS(build_pseudomodes({4.0, 4.0}, jm, grid, 8, true),
                  NumericalError);
}

TEST_CASE("zero couplings leave the amplitudes constant") {
  auto jm = [](double) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 0.0;
    return m;
  };
  FrequencyGrid grid{0.0, 10.0, 0};
  const auto model = build_pseudomodes({5.0}, jm, grid, 32, false);
  SystemConfig cfg = oracle_config(1, 5.0, 2.0, 0.01);
  const Trajectory traj = solve_oracle(model, cfg);
  for (std::size_t i = 0; i < traj.times.size(); i += 20)
    CHECK(traj.population(0, i) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("flat wide band reproduces golden-rule decay") {
  // J = J0 over a band of half-width 40 around resonance: P = e^{-2 pi J0 t}
  // up to band-edge corrections O(Gamma/(W/2)) ~ 0.3%
  const double j0 = 0.02;
  auto jm = [&](double) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = j0;
    return m;
  };
  FrequencyGrid grid{10.0, 90.0, 0};
  const auto model = build_pseudomodes({50.0}, jm, grid, 1600, true);
  SystemConfig cfg = oracle_config(1, 50.0, 24.0, 0.002);
  const auto run = solve_oracle_monitored(model, cfg);
  const double gamma = 2.0 * kPi * j0;
  for (std::size_t i = 0; i < run.trajectory.times.size(); i += 1200) {
    const double t = run.trajectory.times[i];
    CHECK(run.trajectory.population(0, i) ==
          doctest::Approx(std::exp(-gamma * t)).epsilon(0.01));
  }
  // phases span the +-40 band here; the tripwire-grade 1e-10 bound is
  // checked on the resonance-scale runs
  CHECK(run.max_norm_drift < 1e-6);
}

TEST_CASE("RWA conserves excitation number; counter-rotating sector fills "
          "without it") {
  const double g = 0.3, lam = 1.0, wc = 5.0;
  auto jm = [&](double w) {
    const double d = w - wc;
    const double j = g * g / kPi * lam / (d * d + lam * lam);
    Eigen::MatrixXd m(2, 2);
    m << j, j, j, j;
    return m;
  };
  FrequencyGrid grid{0.0, 10.0, 0};
  SystemConfig cfg = oracle_config(2, 5.0, 10.0, 0.005);

  const auto rwa_model = build_pseudomodes({5.0, 5.0}, jm, grid, 400, true);
  const auto rwa_run = solve_oracle_monitored(rwa_model, cfg);
  CHECK(rwa_run.max_norm_drift < 1e-10);
  CHECK(rwa_run.max_counter_population == 0.0);

  const auto full_model = build_pseudomodes({5.0, 5.0}, jm, grid, 400, false);
  const auto full_run = solve_oracle_monitored(full_model, cfg);
  CHECK(full_run.max_norm_drift < 1e-10);
  CHECK(full_run.max_counter_population > 1e-6);
}

TEST_CASE("recurrence horizon is enforced") {
  auto jm = [](double) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 0.05;
    return m;
  };
  FrequencyGrid grid{0.0, 10.0, 0};
  const auto model = build_pseudomodes({5.0}, jm, grid, 8, true);
  // dw = 1.25 -> horizon 2 pi/1.25 ~ 5.0
  SystemConfig cfg = oracle_config(1, 5.0, 50.0, 0.01);
  CHECK_THROWS_AS(solve_oracle(model, cfg), NumericalError);
}
