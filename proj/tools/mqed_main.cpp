// mqed: excited-state quantum dynamics of emitters coupled to medium-dressed
// photonic continua. Subcommands: simulate, weakcoupling, greens, sweep,
// plotscript.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mqed/dynamics.hpp"
#include "mqed/errors.hpp"
#include "mqed/io.hpp"
#include "mqed/kernels.hpp"
#include "mqed/log.hpp"
#include "mqed/oracle.hpp"
#include "mqed/parallel.hpp"
#include "mqed/weak_coupling.hpp"

namespace fs = std::filesystem;
using namespace mqed;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

WeakCouplingOptions weak_options(const SystemConfig& cfg) {
  WeakCouplingOptions o;
  o.quad_rel = cfg.tol.quad_rel;
  o.sommerfeld.rel_tol = std::min(1e-9, cfg.tol.quad_rel);
  return o;
}

TabulationOptions tabulation_options(const SystemConfig& cfg, int jobs) {
  TabulationOptions t;
  t.refine_rel_tol = cfg.tol.tabulation_rel;
  t.sommerfeld.rel_tol = std::min(1e-9, cfg.tol.quad_rel);
  t.jobs = jobs;
  return t;
}

// tabulated scattering densities for all unordered pairs; symmetric lookup
struct DensitySet {
  int n = 0;
  std::vector<SpectralDensity> items;  // index a*n+b for a<=b

  const SpectralDensity& at(int a, int b) const {
    if (a > b) std::swap(a, b);
    return items[static_cast<std::size_t>(a) * n + b];
  }
};

DensitySet tabulate_densities(const SystemConfig& cfg, Part part, int jobs) {
  DensitySet set;
  set.n = static_cast<int>(cfg.emitters.size());
  set.items.resize(static_cast<std::size_t>(set.n) * set.n);
  const auto topt = tabulation_options(cfg, jobs);
  for (int a = 0; a < set.n; ++a)
    for (int b = a; b < set.n; ++b)
      set.items[static_cast<std::size_t>(a) * set.n + b] =
          spectral_density(cfg.emitters[a], cfg.emitters[b], a, b,
                           cfg.frequency, cfg.environment, part, topt);
  return set;
}

Trajectory run_simulation(const SystemConfig& cfg, int jobs,
                          std::map<std::string, double>& timings) {
  validate_config(cfg);
  switch (cfg.method) {
    case Method::Fqd: {
      Timer t_markov;
      const MarkovTerms mt =
          free_space_markov_terms(cfg.emitters, cfg.rwa, weak_options(cfg));
      timings["markov_terms"] = t_markov.ms();
      std::vector<KernelTable> kernels;
      if (!is_vacuum(cfg.environment)) {
        Timer t_tab;
        const DensitySet set =
            tabulate_densities(cfg, Part::Scattering, jobs);
        timings["spectral_tabulation"] = t_tab.ms();
        Timer t_ker;
        std::vector<double> omegas;
        for (const auto& e : cfg.emitters) omegas.push_back(e.omega);
        KernelBuildOptions ko;
        ko.dt = cfg.time.dt;
        ko.tau_max = cfg.resolved_tau_max();
        ko.rwa = cfg.rwa;
        kernels = build_kernels(
            omegas,
            [&](int a, int b) -> const SpectralDensity& {
              return set.at(a, b);
            },
            ko);
        timings["kernel_build"] = t_ker.ms();
      }
      Timer t_solve;
      Trajectory traj = solve_fqd(cfg, mt, kernels);
      timings["solve"] = t_solve.ms();
      return traj;
    }
    case Method::Maqd: {
      Timer t_rep;
      const WeakCouplingReport rep =
          build_weak_coupling_report(cfg.emitters, cfg.environment,
                                     weak_options(cfg));
      timings["weak_coupling_report"] = t_rep.ms();
      Timer t_solve;
      Trajectory traj = solve_maqd(cfg, rep);
      timings["solve"] = t_solve.ms();
      return traj;
    }
    case Method::Oracle: {
      Timer t_tab;
      const DensitySet set = tabulate_densities(cfg, Part::Total, jobs);
      timings["spectral_tabulation"] = t_tab.ms();
      std::vector<double> omegas;
      for (const auto& e : cfg.emitters) omegas.push_back(e.omega);
      auto jmat = [&](double w) {
        Eigen::MatrixXd m(set.n, set.n);
        for (int a = 0; a < set.n; ++a)
          for (int b = 0; b < set.n; ++b)
            m(a, b) = set.at(a, b).interpolate(w);
        return m;
      };
      Timer t_solve;
      const PseudomodeModel model = build_pseudomodes(
          omegas, jmat, cfg.frequency, cfg.oracle.n_modes, cfg.rwa);
      Trajectory traj = solve_oracle(model, cfg);
      timings["solve"] = t_solve.ms();
      return traj;
    }
  }
  throw NumericalError("Internal", "unreachable method");
}

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  int jobs = 1;
  double tol = 0.0;
};

SystemConfig resolve_config(const CommonArgs& args) {
  SystemConfig cfg;
  if (!args.preset.empty())
    cfg = io::preset_config(args.preset);
  else if (!args.config_path.empty())
    cfg = io::load_config_file(args.config_path);
  else
    throw ValidationError("NoConfig",
                          "provide a config file or --preset NAME");
  if (args.tol > 0.0) {
    cfg.tol.quad_rel = args.tol;
    cfg.tol.tabulation_rel = args.tol;
  }
  return cfg;
}

std::string stem_of(const CommonArgs& args) {
  if (!args.preset.empty()) return args.preset;
  return fs::path(args.config_path).stem().string();
}

void write_outputs(const fs::path& dir, const std::string& base,
                   const Trajectory& traj, const SystemConfig& cfg,
                   const std::string& command,
                   std::map<std::string, double> timings) {
  fs::create_directories(dir);
  const fs::path csv = dir / (base + ".csv");
  std::ostringstream body;
  io::write_trajectory_csv(body, traj, cfg.time.output_every);
  std::ofstream out(csv);
  if (!out)
    throw ValidationError("OutputUnwritable", "cannot write " + csv.string());
  out << body.str();
  out.close();
  io::RunManifest man;
  man.config = cfg;
  man.command = command;
  man.timings_ms = std::move(timings);
  man.outputs = {csv.string()};
  io::write_manifest((dir / (base + ".manifest.json")).string(), man);
  log::info("wrote %s", csv.c_str());
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Fqd: return "fqd";
    case Method::Maqd: return "maqd";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

int cmd_simulate(const CommonArgs& args, const std::string& method_flag,
                 int rwa_flag /* -1 unset, 0 no, 1 yes */) {
  SystemConfig cfg = resolve_config(args);
  const bool run_matrix =
      !args.preset.empty() && method_flag.empty() && rwa_flag < 0;
  std::vector<std::pair<Method, bool>> variants;
  if (run_matrix) {
    variants = {{Method::Fqd, false},
                {Method::Fqd, true},
                {Method::Maqd, false},
                {Method::Maqd, true}};
  } else {
    Method m = cfg.method;
    if (method_flag == "fqd") m = Method::Fqd;
    else if (method_flag == "maqd") m = Method::Maqd;
    else if (method_flag == "oracle") m = Method::Oracle;
    else if (!method_flag.empty())
      throw ValidationError("UnknownMethod", "--method " + method_flag);
    variants = {{m, rwa_flag < 0 ? cfg.rwa : rwa_flag == 1}};
  }
  for (const auto& [method, rwa] : variants) {
    SystemConfig run = cfg;
    run.method = method;
    run.rwa = rwa;
    std::map<std::string, double> timings;
    Timer total;
    Trajectory traj = run_simulation(run, args.jobs, timings);
    timings["total"] = total.ms();
    const std::string base = stem_of(args) + "_" + method_name(method) +
                             (rwa ? "_rwa" : "_norwa");
    write_outputs(args.out_dir, base, traj, run, "simulate", timings);
  }
  return 0;
}

int cmd_weakcoupling(const CommonArgs& args) {
  SystemConfig cfg = resolve_config(args);
  validate_config(cfg);
  std::map<std::string, double> timings;
  Timer total;
  const WeakCouplingReport rep = build_weak_coupling_report(
      cfg.emitters, cfg.environment, weak_options(cfg));
  timings["total"] = total.ms();
  fs::create_directories(args.out_dir);
  const fs::path csv =
      fs::path(args.out_dir) / (stem_of(args) + "_weakcoupling.csv");
  std::ostringstream body;
  io::write_weak_report_csv(body, rep);
  std::ofstream out(csv);
  if (!out)
    throw ValidationError("OutputUnwritable", "cannot write " + csv.string());
  out << body.str();
  out.close();
  io::RunManifest man;
  man.config = cfg;
  man.command = "weakcoupling";
  man.timings_ms = timings;
  man.outputs = {csv.string()};
  io::write_manifest(
      (fs::path(args.out_dir) / (stem_of(args) + "_weakcoupling.manifest.json"))
          .string(),
      man);
  return 0;
}

int cmd_greens(const CommonArgs& args, int pair_i, int pair_j,
               const std::string& part_name) {
  SystemConfig cfg = resolve_config(args);
  validate_config(cfg);
  Part part = Part::Total;
  if (part_name == "free") part = Part::Free;
  else if (part_name == "scattering") part = Part::Scattering;
  else if (part_name != "total")
    throw ValidationError("UnknownPart",
                          "--part must be free, scattering or total");
  const int n = static_cast<int>(cfg.emitters.size());
  if (pair_i < 1 || pair_i > n || pair_j < 1 || pair_j > n)
    throw ValidationError("BadPair", "--pair indices are 1-based emitter "
                                     "indices");
  const Emitter& a = cfg.emitters[pair_i - 1];
  const Emitter& b = cfg.emitters[pair_j - 1];
  const bool coincident = (a.position - b.position).norm() < 1e-14;

  const auto& fg = cfg.frequency;
  std::vector<double> omegas;
  for (int k = 0; k < fg.n_points; ++k) {
    const double w = fg.omega_min +
                     (fg.omega_max - fg.omega_min) * k / (fg.n_points - 1);
    if (w > 0.0) omegas.push_back(w);
  }
  SommerfeldOptions sopt;
  sopt.rel_tol = std::min(1e-9, cfg.tol.quad_rel);
  std::vector<Mat3c> tensors(omegas.size());
  std::vector<double> jvals(omegas.size());
  parallel_for(omegas.size(), args.jobs, [&](std::size_t k) {
    const double w = omegas[k];
    Mat3c g = Mat3c::Zero();
    if (part == Part::Free || part == Part::Total) {
      if (coincident)
        g += free_space_im_gf_coincident(w).cast<Complex>() * kI;
      else
        g += free_space_gf(a.position, b.position, w);
    }
    if ((part == Part::Scattering || part == Part::Total) &&
        !is_vacuum(cfg.environment))
      g += half_space_scattering_gf(a.position, b.position, w,
                                    cfg.environment, sopt);
    tensors[k] = g;
    jvals[k] = spectral_density_value(a, b, w, cfg.environment, part, sopt);
  });
  fs::create_directories(args.out_dir);
  const std::string base = stem_of(args) + "_greens_" + std::to_string(pair_i) +
                           std::to_string(pair_j) + "_" + part_name;
  const fs::path csv = fs::path(args.out_dir) / (base + ".csv");
  std::ofstream out(csv);
  if (!out)
    throw ValidationError("OutputUnwritable", "cannot write " + csv.string());
  std::ostringstream body;
  io::write_greens_csv(body, omegas, tensors, jvals);
  out << body.str();
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis,
              const std::string& range) {
  SystemConfig cfg = resolve_config(args);
  validate_config(cfg);
  if (cfg.emitters.size() != 2)
    throw ValidationError("AxisInapplicable",
                          "sweeps are defined for two-emitter systems");
  double lo = 0.0, hi = 0.0;
  int count = 0;
  {
    std::stringstream ss(range);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3)
      throw ValidationError("BadRange", "--range start:stop:count");
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    count = std::stoi(parts[2]);
  }
  if (count < 1)
    throw ValidationError("BadRange", "empty range");

  std::vector<double> values;
  for (int k = 0; k < count; ++k)
    values.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));

  std::vector<SystemConfig> subs(values.size(), cfg);
  for (std::size_t k = 0; k < values.size(); ++k) {
    SystemConfig& s = subs[k];
    const double v = values[k];
    if (axis == "d") {
      s.emitters[1].position =
          s.emitters[0].position + Vec3(v, 0.0, 0.0);
    } else if (axis == "h") {
      s.emitters[0].position.z() = v;
      s.emitters[1].position.z() = v;
    } else if (axis == "detuning") {
      s.emitters[1].omega = s.emitters[0].omega + v;
    } else {
      throw ValidationError("AxisInapplicable",
                            "--axis must be d, h or detuning");
    }
    validate_config(s);
  }

  std::vector<Trajectory> results(subs.size());
  std::vector<std::string> errors(subs.size());
  parallel_for(subs.size(), args.jobs, [&](std::size_t k) {
    try {
      std::map<std::string, double> t;
      results[k] = run_simulation(subs[k], 1, t);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("SweepFailed", e);

  fs::create_directories(args.out_dir);
  const std::string base = stem_of(args) + "_sweep_" + axis;
  const fs::path csv = fs::path(args.out_dir) / (base + ".csv");
  std::ofstream out(csv);
  if (!out)
    throw ValidationError("OutputUnwritable", "cannot write " + csv.string());
  // long format: axis columns prepended to the trajectory columns
  io::RunManifest man;
  man.config = cfg;
  man.command = "sweep " + axis + " " + range;
  for (std::size_t k = 0; k < subs.size(); ++k)
    man.sub_hashes.push_back(io::config_hash(subs[k]));
  bool header_done = false;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    std::ostringstream body;
    io::write_trajectory_csv(body, results[k], cfg.time.output_every);
    std::istringstream lines(body.str());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
      if (first) {
        if (!header_done) {
          out << "axis,value," << line << '\n';
          header_done = true;
        }
        first = false;
        continue;
      }
      out << axis << ',' << io::format_g17(values[k]) << ',' << line << '\n';
    }
  }
  out.close();
  man.outputs = {csv.string()};
  io::write_manifest(
      (fs::path(args.out_dir) / (base + ".manifest.json")).string(), man);
  return 0;
}

int cmd_plotscript(const std::vector<std::string>& csvs,
                   const std::string& out_file) {
  const std::string script = io::make_plot_script(csvs);
  std::ofstream out(out_file);
  if (!out)
    throw ValidationError("OutputUnwritable", "cannot write " + out_file);
  out << script;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macroscopic-QED emitter dynamics"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string method_flag;
  int rwa_flag = -1;
  std::string axis = "d", range, part_name = "total";
  int pair_i = 1, pair_j = 1;
  std::vector<std::string> csv_inputs;
  std::string plot_out = "plot.py";

  auto add_common = [&](CLI::App* sub, bool with_config = true) {
    if (with_config)
      sub->add_option("config", args.config_path, "JSON config file");
    sub->add_option("--preset", args.preset, "built-in scenario preset");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--jobs", args.jobs, "parallel workers");
    sub->add_option("--tol", args.tol, "override quadrature tolerance");
  };

  auto* sim = app.add_subcommand("simulate", "propagate amplitude dynamics");
  add_common(sim);
  sim->add_option("--method", method_flag, "fqd|maqd|oracle");
  sim->add_flag_callback("--rwa", [&] { rwa_flag = 1; },
                         "enable the rotating-wave approximation");
  sim->add_flag_callback("--no-rwa", [&] { rwa_flag = 0; },
                         "disable the rotating-wave approximation");

  auto* weak = app.add_subcommand("weakcoupling",
                                  "Markov-regime rates, shifts, couplings");
  add_common(weak);

  auto* greens = app.add_subcommand("greens",
                                    "dump Green's tensors and J over the "
                                    "frequency grid");
  add_common(greens);
  greens->add_option("--pair-i", pair_i, "first emitter index (1-based)");
  greens->add_option("--pair-j", pair_j, "second emitter index (1-based)");
  greens->add_option("--part", part_name, "free|scattering|total");

  auto* sweep = app.add_subcommand("sweep", "parameter sweeps (d, h, "
                                            "detuning)");
  add_common(sweep);
  sweep->add_option("--axis", axis, "d|h|detuning");
  sweep->add_option("--range", range, "start:stop:count")->required();

  auto* plot = app.add_subcommand("plotscript",
                                  "emit a matplotlib script for trajectory "
                                  "CSVs");
  plot->add_option("csv", csv_inputs, "trajectory CSV files")->required();
  plot->add_option("--out", plot_out, "output script path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(args, method_flag, rwa_flag);
    if (weak->parsed()) return cmd_weakcoupling(args);
    if (greens->parsed()) return cmd_greens(args, pair_i, pair_j, part_name);
    if (sweep->parsed()) return cmd_sweep(args, axis, range);
    if (plot->parsed()) return cmd_plotscript(csv_inputs, plot_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
