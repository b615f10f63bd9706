#include "mqed/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"

namespace mqed {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXcd;
}  // namespace

PseudomodeModel build_pseudomodes(
    const std::vector<double>& emitter_omega,
    const std::function<Eigen::MatrixXd(double)>& j_matrix,
    const FrequencyGrid& grid, int n_modes, bool rwa, double psd_tol) {
  if (n_modes < 2)
    throw ValidationError("TooFewModes", "need at least 2 pseudomodes");
  const int n = static_cast<int>(emitter_omega.size());
  PseudomodeModel model;
  model.n_emitters = n;
  model.rwa = rwa;
  model.emitter_omega = emitter_omega;
  const double dw = (grid.omega_max - grid.omega_min) / n_modes;
  model.delta_omega = dw;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) model.pairs.emplace_back(a, b);

  std::vector<double> freqs;
  std::vector<Eigen::VectorXd> cols;
  for (int j = 0; j < n_modes; ++j) {
    const double wj = grid.omega_min + (j + 0.5) * dw;
    MatrixXd jm = j_matrix(wj);
    jm = 0.5 * (jm + jm.transpose().eval());  // enforce exact symmetry
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(jm);
    const double scale = std::max(1.0e-300, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
      const double lam = es.eigenvalues()(k);
      if (lam < -psd_tol * scale)
        throw NumericalError(
            "NonPSDSpectralMatrix",
            "J matrix eigenvalue " + std::to_string(lam) + " at omega = " +
                std::to_string(wj) +
                " is negative beyond tolerance; upstream Green's-function "
                "inconsistency");
      if (lam <= 0.0) continue;  // rank-deficient slice: drop the null mode
      freqs.push_back(wj);
      cols.push_back(std::sqrt(lam * dw) * es.eigenvectors().col(k));
    }
  }
  model.mode_omega = std::move(freqs);
  model.couplings.resize(n, static_cast<int>(cols.size()));
  for (std::size_t m = 0; m < cols.size(); ++m)
    model.couplings.col(static_cast<int>(m)) = cols[m];
  return model;
}

namespace {

// H psi product over the truncated basis, with a global energy offset
// (mean emitter energy) subtracted to keep the RK4 phase steps small;
// layout: [emitters | modes | pair-sector (pair-major, mode-minor)]
struct OracleWorkspace {
  const PseudomodeModel& model;
  int n;
  std::size_t n_modes;
  std::size_t dim;
  double e_ref;

  explicit OracleWorkspace(const PseudomodeModel& m)
      : model(m),
        n(m.n_emitters),
        n_modes(m.mode_omega.size()),
        dim(m.dimension()) {
    e_ref = 0.0;
    for (double w : m.emitter_omega) e_ref += w;
    e_ref /= std::max(1, n);
  }

  std::size_t mode_index(std::size_t j) const { return n + j; }
  std::size_t pair_index(std::size_t p, std::size_t j) const {
    return n + n_modes + p * n_modes + j;
  }

  void apply_h(const VectorXcd& psi, VectorXcd& out) const {
    const auto& g = model.couplings;
    for (int a = 0; a < n; ++a)
      out(a) = (model.emitter_omega[a] - e_ref) * psi(a);
    for (std::size_t j = 0; j < n_modes; ++j) {
      Complex acc = (model.mode_omega[j] - e_ref) * psi(mode_index(j));
      for (int a = 0; a < n; ++a) acc -= g(a, j) * psi(a);
      out(mode_index(j)) = acc;
      for (int a = 0; a < n; ++a) out(a) -= g(a, j) * psi(mode_index(j));
    }
    if (!model.rwa) {
      for (std::size_t p = 0; p < model.pairs.size(); ++p) {
        const auto [a, b] = model.pairs[p];
        const double wab =
            model.emitter_omega[a] + model.emitter_omega[b];
        for (std::size_t j = 0; j < n_modes; ++j) {
          const std::size_t idx = pair_index(p, j);
          Complex acc = (wab + model.mode_omega[j] - e_ref) * psi(idx);
          // |E_a,0> <-> |E_ab,1_j> via the counter-rotating vertex g_b, and
          // |E_b,0> via g_a
          acc -= g(b, j) * psi(a) + g(a, j) * psi(b);
          out(idx) = acc;
          out(a) -= g(b, j) * psi(idx);
          out(b) -= g(a, j) * psi(idx);
        }
      }
    }
  }
};

}  // namespace

OracleRun solve_oracle_monitored(const PseudomodeModel& model,
                                 const SystemConfig& config) {
  const double dt = config.time.dt;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(config.time.t_max / dt));
  const double horizon = 2.0 * units::kPi / model.delta_omega;
  if (config.time.t_max > horizon)
    throw NumericalError(
        "RecurrenceHorizonExceeded",
        "t_max = " + std::to_string(config.time.t_max) +
            " exceeds the discretization recurrence time 2 pi/dw = " +
            std::to_string(horizon) + "; increase the mode count");

  OracleWorkspace ws(model);
  VectorXcd psi = VectorXcd::Zero(ws.dim);
  {
    auto init = config.resolved_initial_amplitudes();
    for (int i = 0; i < ws.n; ++i) psi(i) = init[i];
  }

  // norm-preserving to integrator accuracy: plain RK4 at dt/4
  const int sub = 4;
  const double h = dt / sub;
  VectorXcd k1(ws.dim), k2(ws.dim), k3(ws.dim), k4(ws.dim), tmp(ws.dim);
  auto deriv = [&](const VectorXcd& p, VectorXcd& out) {
    ws.apply_h(p, out);
    out *= Complex(0.0, -1.0);
  };

  OracleRun run;
  run.trajectory.times.resize(n_steps + 1);
  run.trajectory.amplitudes.assign(ws.n,
                                   std::vector<Complex>(n_steps + 1));
  auto record = [&](std::size_t m) {
    const double t = m * dt;
    run.trajectory.times[m] = t;
    for (int a = 0; a < ws.n; ++a) {
      // interaction-picture amplitude: strip the bare phase relative to
      // the propagation offset
      run.trajectory.amplitudes[a][m] =
          psi(a) * std::polar(1.0, (model.emitter_omega[a] - ws.e_ref) * t);
    }
    run.max_norm_drift =
        std::max(run.max_norm_drift, std::abs(psi.norm() - 1.0));
    if (!model.rwa && ws.dim > ws.n + ws.n_modes) {
      double counter = 0.0;
      for (std::size_t i = ws.n + ws.n_modes; i < ws.dim; ++i)
        counter += std::norm(psi(i));
      run.max_counter_population =
          std::max(run.max_counter_population, counter);
    }
  };
  record(0);

  for (std::size_t m = 0; m < n_steps; ++m) {
    for (int s = 0; s < sub; ++s) {
      deriv(psi, k1);
      tmp = psi + 0.5 * h * k1;
      deriv(tmp, k2);
      tmp = psi + 0.5 * h * k2;
      deriv(tmp, k3);
      tmp = psi + h * k3;
      deriv(tmp, k4);
      psi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    record(m + 1);
  }
  return run;
}

Trajectory solve_oracle(const PseudomodeModel& model,
                        const SystemConfig& config) {
  return solve_oracle_monitored(model, config).trajectory;
}

}  // namespace mqed
