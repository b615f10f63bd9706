#include "mqed/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"

namespace mqed {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

bool degenerate_frequencies(const std::vector<Emitter>& emitters) {
  for (std::size_t i = 1; i < emitters.size(); ++i)
    if (std::abs(emitters[i].omega - emitters[0].omega) >
        1e-12 * emitters[0].omega)
      return false;
  return true;
}

// combined kernels per equation row: the C_alpha-weighted diagonal kernel
// (co-rotating self plus counter-rotating local terms) and the C_beta-
// weighted cross kernels (co-rotating plus counter-rotating cross), which
// share the residual detuning phase and therefore the same history vector.
struct CombinedKernels {
  std::vector<std::vector<Complex>> diag;        // [alpha][j]
  std::vector<std::vector<std::vector<Complex>>> cross;  // [alpha][beta][j]
  std::vector<std::size_t> trunc_steps;          // history window per row
  std::size_t n_tau = 0;
};

CombinedKernels combine_kernels(int n, const std::vector<KernelTable>& tables,
                                double dt, double tail_tol, double t_max) {
  CombinedKernels ck;
  std::size_t n_tau = 0;
  for (const auto& t : tables) n_tau = std::max(n_tau, t.values.size());
  ck.n_tau = n_tau;
  ck.diag.assign(n, std::vector<Complex>(n_tau, Complex(0.0)));
  ck.cross.assign(
      n, std::vector<std::vector<Complex>>(
             n, std::vector<Complex>(n_tau, Complex(0.0))));
  for (const auto& t : tables) {
    if (std::abs(t.dt - dt) > 1e-12 * dt)
      throw ValidationError("KernelStepMismatch",
                            "kernel tables must be sampled at the solver dt");
    auto add_to = [&](std::vector<Complex>& dst) {
      for (std::size_t j = 0; j < t.values.size(); ++j) dst[j] += t.values[j];
    };
    switch (t.kind) {
      case KernelKind::CoRotating:
        if (t.row == t.col)
          add_to(ck.diag[t.row]);
        else
          add_to(ck.cross[t.row][t.col]);
        break;
      case KernelKind::CounterLocal:
        add_to(ck.diag[t.row]);
        break;
      case KernelKind::CounterCross:
        add_to(ck.cross[t.row][t.col]);
        break;
    }
  }
  // per-row history window from the combined kernel mass; tables covering
  // the whole run need no truncation (and hence no decay within tau_max)
  ck.trunc_steps.assign(n, n_tau + 1);
  if (n_tau * dt < t_max) {
    for (int a = 0; a < n; ++a) {
      KernelTable probe;
      probe.dt = dt;
      probe.values = ck.diag[a];
      for (int b = 0; b < n; ++b)
        if (b != a)
          for (std::size_t j = 0; j < ck.cross[a][b].size(); ++j)
            probe.values[j] += ck.cross[a][b][j];
      const double tau_trunc = kernel_memory_bound(probe, tail_tol);
      ck.trunc_steps[a] =
          static_cast<std::size_t>(std::ceil(tau_trunc / dt)) + 1;
    }
  }
  return ck;
}

}  // namespace

Trajectory solve_fqd(const SystemConfig& config, const MarkovTerms& markov,
                     const std::vector<KernelTable>& kernels) {
  const int n = static_cast<int>(config.emitters.size());
  const double dt = config.time.dt;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(config.time.t_max / dt));

  CombinedKernels ck = combine_kernels(n, kernels, dt,
                                       config.tol.kernel_tail,
                                       config.time.t_max);

  std::vector<double> omega(n);
  for (int i = 0; i < n; ++i) omega[i] = config.emitters[i].omega;
  const bool degenerate = degenerate_frequencies(config.emitters);

  // histories: amplitudes C_b[m] and the detuning-phased variants
  // e^{-i(w_b - w_a) t_m} C_b[m] per ordered pair (only when non-degenerate)
  std::vector<std::vector<Complex>> hist(n);
  std::vector<std::vector<std::vector<Complex>>> phased;
  if (!degenerate)
    phased.assign(n, std::vector<std::vector<Complex>>(n));
  for (auto& h : hist) h.reserve(n_steps + 1);
  if (!degenerate)
    for (auto& row : phased)
      for (auto& h : row) h.reserve(n_steps + 1);

  auto push_state = [&](const VectorXcd& c, std::size_t m) {
    for (int b = 0; b < n; ++b) hist[b].push_back(c(b));
    if (!degenerate) {
      const double t = m * dt;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          phased[a][b].push_back(
              std::polar(1.0, -(omega[b] - omega[a]) * t) * c(b));
        }
    }
  };
  auto pair_hist = [&](int a, int b) -> const std::vector<Complex>& {
    return degenerate ? hist[b] : phased[a][b];
  };

  // history sum for row a at time index m_top over nodes [m0, m_top];
  // `include_top` controls the newest node (excluded for the corrector RHS)
  auto history_sum = [&](int a, std::size_t m_top, bool include_top) {
    Complex acc(0.0);
    const std::size_t win = ck.trunc_steps[a];
    const std::size_t m0 = (ck.n_tau == 0 || m_top + 1 <= win)
                               ? 0
                               : m_top + 1 - win;
    if (ck.n_tau == 0) return acc;
    auto dot = [&](const std::vector<Complex>& k,
                   const std::vector<Complex>& h) {
      Complex s(0.0);
      const std::size_t top = include_top ? m_top : m_top - 1;
      if (m_top == 0 && !include_top) return s;
      for (std::size_t m = m0; m <= top; ++m) {
        double w = 1.0;
        if (m == 0) w = 0.5;
        if (m == m_top && include_top) w = (m == 0) ? 0.0 : 0.5;
        const std::size_t lag = m_top - m;
        if (lag >= k.size()) continue;
        s += w * k[lag] * h[m];
      }
      return s;
    };
    acc += dot(ck.diag[a], hist[a]);
    for (int b = 0; b < n; ++b)
      if (b != a) acc += dot(ck.cross[a][b], pair_hist(a, b));
    return acc * dt;
  };

  auto markov_matrix = [&](double t) {
    MatrixXcd m = MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      m(a, a) = -0.5 * markov.gamma0(a);
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        m(a, b) = -kI * markov.v0(a, b) *
                  std::polar(1.0, -(omega[b] - omega[a]) * t);
      }
    }
    return m;
  };

  VectorXcd c(n);
  {
    auto init = config.resolved_initial_amplitudes();
    for (int i = 0; i < n; ++i) c(i) = init[i];
  }

  Trajectory traj;
  traj.times.resize(n_steps + 1);
  traj.amplitudes.assign(n, std::vector<Complex>(n_steps + 1));
  auto record = [&](std::size_t m) {
    traj.times[m] = m * dt;
    for (int i = 0; i < n; ++i) traj.amplitudes[i][m] = c(i);
  };
  push_state(c, 0);
  record(0);

  const double step_tol = config.tol.step;
  MatrixXcd lhs(n, n);
  VectorXcd f_now(n), rhs(n), c_pred(n), s_hist(n);

  for (std::size_t m = 0; m < n_steps; ++m) {
    const double t_now = m * dt;
    const double t_next = (m + 1) * dt;
    // F(t_m) with full history
    for (int a = 0; a < n; ++a) s_hist(a) = history_sum(a, m, true);
    f_now = markov_matrix(t_now) * c - s_hist;
    c_pred = c + dt * f_now;

    // corrector: (I - dt/2 A_eff(t_next)) C_{m+1} = C_m + dt/2 (F_m + b)
    // where A_eff carries the Markov matrix plus the newest history node
    // weight (dt/2 K[0]) and b the history sum over the older nodes.
    for (int a = 0; a < n; ++a) s_hist(a) = history_sum(a, m + 1, false);

    MatrixXcd a_eff = markov_matrix(t_next);
    if (ck.n_tau > 0) {
      for (int a = 0; a < n; ++a) {
        a_eff(a, a) -= 0.5 * dt * ck.diag[a][0];
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          const Complex ph =
              degenerate ? Complex(1.0)
                         : std::polar(1.0, -(omega[b] - omega[a]) * t_next);
          a_eff(a, b) -= 0.5 * dt * ck.cross[a][b][0] * ph;
        }
      }
    }
    lhs = MatrixXcd::Identity(n, n) - 0.5 * dt * a_eff;
    rhs = c + 0.5 * dt * (f_now - s_hist);
    const VectorXcd c_next = lhs.partialPivLu().solve(rhs);

    const double resid = (c_next - c_pred).norm() / (1.0 + c_next.norm());
    if (resid > step_tol)
      throw NumericalError(
          "StepRejected",
          "corrector residual " + std::to_string(resid) + " above " +
              std::to_string(step_tol) + " at t = " + std::to_string(t_next) +
              "; reduce dt");
    if (!c_next.allFinite())
      throw NumericalError("StepRejected",
                           "non-finite amplitude at t = " +
                               std::to_string(t_next));
    c = c_next;
    push_state(c, m + 1);
    record(m + 1);
  }
  return traj;
}

Trajectory solve_maqd(const SystemConfig& config,
                      const WeakCouplingReport& report) {
  const int n = static_cast<int>(config.emitters.size());
  const double dt = config.time.dt;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(config.time.t_max / dt));
  const bool rwa = config.rwa;

  // diagonal: Delta^Sc_e [+ sum Delta^Sc_g without RWA] - i Gamma/2
  // off-diagonal: V_DDI (no RWA) or V_DDI~ (RWA), with detuning phases
  VectorXcd diag(n);
  for (int a = 0; a < n; ++a) {
    double shift = report.shift_e[a];
    if (!rwa)
      for (int b = 0; b < n; ++b)
        if (b != a) shift += report.shift_g[b];
    diag(a) = -kI * shift - 0.5 * report.gamma[a];
  }
  const MatrixXcd v = rwa ? report.v_ddi_rwa() : report.v_ddi();

  std::vector<double> omega(n);
  for (int i = 0; i < n; ++i) omega[i] = config.emitters[i].omega;

  VectorXcd c0(n);
  {
    auto init = config.resolved_initial_amplitudes();
    for (int i = 0; i < n; ++i) c0(i) = init[i];
  }

  Trajectory traj;
  traj.times.resize(n_steps + 1);
  traj.amplitudes.assign(n, std::vector<Complex>(n_steps + 1));

  if (degenerate_frequencies(config.emitters)) {
    // constant coefficient matrix: closed-form propagation through the
    // eigensystem removes stepping error entirely
    MatrixXcd b = MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      b(a, a) = diag(a);
      for (int j = 0; j < n; ++j)
        if (j != a) b(a, j) = -kI * v(a, j);
    }
    Eigen::ComplexEigenSolver<MatrixXcd> es(b);
    const MatrixXcd& vec = es.eigenvectors();
    const VectorXcd lam = es.eigenvalues();
    const VectorXcd y0 = vec.partialPivLu().solve(c0);
    for (std::size_t m = 0; m <= n_steps; ++m) {
      const double t = m * dt;
      VectorXcd y(n);
      for (int k = 0; k < n; ++k) y(k) = std::exp(lam(k) * t) * y0(k);
      const VectorXcd c = vec * y;
      traj.times[m] = t;
      for (int i = 0; i < n; ++i) traj.amplitudes[i][m] = c(i);
    }
    return traj;
  }

  // non-degenerate: classic RK4 on the phased linear system with step
  // subdivision well below the fastest detuning phase
  auto rhs = [&](double t, const VectorXcd& c) {
    VectorXcd d(n);
    for (int a = 0; a < n; ++a) {
      Complex acc = diag(a) * c(a);
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        acc -= kI * v(a, b) *
               std::polar(1.0, -(omega[b] - omega[a]) * t) * c(b);
      }
      d(a) = acc;
    }
    return d;
  };
  double max_det = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      max_det = std::max(max_det, std::abs(omega[a] - omega[b]));
  const int sub = std::max(
      1, static_cast<int>(std::ceil(dt * std::max(max_det, 1.0) / 0.05)));
  const double h = dt / sub;

  VectorXcd c = c0;
  traj.times[0] = 0.0;
  for (int i = 0; i < n; ++i) traj.amplitudes[i][0] = c(i);
  for (std::size_t m = 0; m < n_steps; ++m) {
    double t = m * dt;
    for (int s = 0; s < sub; ++s) {
      const VectorXcd k1 = rhs(t, c);
      const VectorXcd k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1);
      const VectorXcd k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2);
      const VectorXcd k4 = rhs(t + h, c + h * k3);
      c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
    traj.times[m + 1] = (m + 1) * dt;
    for (int i = 0; i < n; ++i) traj.amplitudes[i][m + 1] = c(i);
  }
  return traj;
}

PairPopulations analytic_pair_populations(double gamma, Complex v,
                                          const std::vector<double>& times) {
  PairPopulations p;
  p.donor.resize(times.size());
  p.acceptor.resize(times.size());
  p.total.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double decay = std::exp(-gamma * t);
    const double sh = std::sinh(v.imag() * t);
    const double cs = std::cos(v.real() * t);
    const double sn = std::sin(v.real() * t);
    p.donor[i] = decay * (sh * sh + cs * cs);
    p.acceptor[i] = decay * (sh * sh + sn * sn);
    p.total[i] = decay * std::cosh(2.0 * v.imag() * t);
  }
  return p;
}

ConvergenceReport convergence_sweep(
    const SystemConfig& config, const std::vector<int>& factors,
    const std::function<Trajectory(const SystemConfig&)>& runner) {
  if (factors.size() < 2)
    throw ValidationError("TooFewFactors",
                          "convergence sweep needs at least two factors");
  ConvergenceReport rep;
  rep.factors = factors;
  std::vector<Trajectory> runs;
  for (int f : factors) {
    SystemConfig c = config;
    c.time.dt = config.time.dt / f;
    c.frequency.n_points = config.frequency.n_points * f;
    runs.push_back(runner(c));
  }
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    const Trajectory& coarse = runs[r];
    const Trajectory& fine = runs[r + 1];
    const int ratio = factors[r + 1] / factors[r];
    double dev = 0.0;
    for (std::size_t m = 0; m < coarse.times.size(); ++m) {
      const std::size_t mf = m * ratio;
      if (mf >= fine.times.size()) break;
      for (std::size_t e = 0; e < coarse.n_emitters(); ++e)
        dev = std::max(dev, std::abs(coarse.population(e, m) -
                                     fine.population(e, mf)));
    }
    rep.deviations.push_back(dev);
  }
  rep.converging = true;
  for (std::size_t i = 0; i + 1 < rep.deviations.size(); ++i)
    if (!(rep.deviations[i + 1] < rep.deviations[i] ||
          rep.deviations[i + 1] < 1e-12))
      rep.converging = false;
  if (!rep.converging)
    throw NumericalError("NotConverging",
                         "population deviations do not decrease under "
                         "refinement");
  return rep;
}

}  // namespace mqed
