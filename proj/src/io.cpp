#include "mqed/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "mqed/constants.hpp"
#include "mqed/errors.hpp"

namespace mqed::io {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ValidationError("UnknownKey",
                            where + ": unknown key '" + it.key() + "'");
  }
}

Vec3 vec3_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError("BadVector", where + ": expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

SystemConfig config_from_json(const json& j) {
  SystemConfig c;
  reject_unknown_keys(j,
                      {"schema_version", "emitters", "environment",
                       "initial_amplitudes", "method", "rwa", "time_grid",
                       "frequency_grid", "tau_max", "oracle", "tolerances"},
                      "config");
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw ValidationError("SchemaVersion",
                          "config requires \"schema_version\": 1");

  for (const auto& je : j.at("emitters")) {
    reject_unknown_keys(je, {"position_nm", "omega_ev", "dipole_debye"},
                        "emitter");
    c.emitters.push_back(Emitter::from_debye(
        vec3_from_json(je.at("position_nm"), "position_nm"),
        je.at("omega_ev").get<double>(),
        vec3_from_json(je.at("dipole_debye"), "dipole_debye")));
  }

  const auto& jenv = j.at("environment");
  const std::string type = jenv.at("type").get<std::string>();
  if (type == "vacuum") {
    reject_unknown_keys(jenv, {"type"}, "environment");
    c.environment = Vacuum{};
  } else if (type == "drude_half_space") {
    reject_unknown_keys(jenv, {"type", "omega_p_ev", "omega_p_sq_ev2",
                               "gamma_ev"},
                        "environment");
    DrudeHalfSpace d;
    const bool has_wp = jenv.contains("omega_p_ev");
    const bool has_wp2 = jenv.contains("omega_p_sq_ev2");
    if (has_wp == has_wp2)
      throw ValidationError("DrudeParams",
                            "specify exactly one of omega_p_ev / "
                            "omega_p_sq_ev2");
    d.omega_p = has_wp ? jenv["omega_p_ev"].get<double>()
                       : std::sqrt(jenv["omega_p_sq_ev2"].get<double>());
    d.gamma = jenv.at("gamma_ev").get<double>();
    c.environment = d;
  } else {
    throw ValidationError("UnknownEnvironment",
                          "environment.type must be vacuum or "
                          "drude_half_space");
  }

  if (j.contains("initial_amplitudes")) {
    for (const auto& ja : j["initial_amplitudes"]) {
      if (!ja.is_array() || ja.size() != 2)
        throw ValidationError("BadAmplitude",
                              "initial amplitudes are [re, im] pairs");
      c.initial_amplitudes.emplace_back(ja[0].get<double>(),
                                        ja[1].get<double>());
    }
  }

  const std::string method = j.at("method").get<std::string>();
  if (method == "fqd")
    c.method = Method::Fqd;
  else if (method == "maqd")
    c.method = Method::Maqd;
  else if (method == "oracle")
    c.method = Method::Oracle;
  else
    throw ValidationError("UnknownMethod",
                          "method must be fqd, maqd or oracle");
  c.rwa = j.value("rwa", false);

  const auto& jt = j.at("time_grid");
  reject_unknown_keys(jt, {"t_max", "dt", "output_every"}, "time_grid");
  c.time.t_max = jt.at("t_max").get<double>();
  c.time.dt = jt.at("dt").get<double>();
  c.time.output_every = jt.value("output_every", 1);

  const auto& jf = j.at("frequency_grid");
  reject_unknown_keys(jf, {"omega_min", "omega_max", "n_points"},
                      "frequency_grid");
  c.frequency.omega_min = jf.at("omega_min").get<double>();
  c.frequency.omega_max = jf.at("omega_max").get<double>();
  c.frequency.n_points = jf.at("n_points").get<int>();

  c.tau_max = j.value("tau_max", 0.0);

  if (j.contains("oracle")) {
    reject_unknown_keys(j["oracle"], {"n_modes"}, "oracle");
    c.oracle.n_modes = j["oracle"].value("n_modes", 400);
  }
  if (j.contains("tolerances")) {
    const auto& jl = j["tolerances"];
    reject_unknown_keys(jl,
                        {"quad_abs", "quad_rel", "tabulation_rel",
                         "kernel_tail", "step"},
                        "tolerances");
    c.tol.quad_abs = jl.value("quad_abs", c.tol.quad_abs);
    c.tol.quad_rel = jl.value("quad_rel", c.tol.quad_rel);
    c.tol.tabulation_rel = jl.value("tabulation_rel", c.tol.tabulation_rel);
    c.tol.kernel_tail = jl.value("kernel_tail", c.tol.kernel_tail);
    c.tol.step = jl.value("step", c.tol.step);
  }
  return c;
}

json config_to_json(const SystemConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["emitters"] = json::array();
  for (const auto& e : c.emitters) {
    json je;
    je["position_nm"] = {e.position.x(), e.position.y(), e.position.z()};
    je["omega_ev"] = e.omega;
    const Vec3 d = e.dipole / units::kDebye;
    je["dipole_debye"] = {d.x(), d.y(), d.z()};
    j["emitters"].push_back(je);
  }
  if (is_vacuum(c.environment)) {
    j["environment"] = {{"type", "vacuum"}};
  } else {
    const auto& d = std::get<DrudeHalfSpace>(c.environment);
    j["environment"] = {{"type", "drude_half_space"},
                        {"omega_p_ev", d.omega_p},
                        {"gamma_ev", d.gamma}};
  }
  if (!c.initial_amplitudes.empty()) {
    json ja = json::array();
    for (const auto& a : c.initial_amplitudes)
      ja.push_back({a.real(), a.imag()});
    j["initial_amplitudes"] = ja;
  }
  switch (c.method) {
    case Method::Fqd: j["method"] = "fqd"; break;
    case Method::Maqd: j["method"] = "maqd"; break;
    case Method::Oracle: j["method"] = "oracle"; break;
  }
  j["rwa"] = c.rwa;
  j["time_grid"] = {{"t_max", c.time.t_max},
                    {"dt", c.time.dt},
                    {"output_every", c.time.output_every}};
  j["frequency_grid"] = {{"omega_min", c.frequency.omega_min},
                         {"omega_max", c.frequency.omega_max},
                         {"n_points", c.frequency.n_points}};
  if (c.tau_max > 0.0) j["tau_max"] = c.tau_max;
  j["oracle"] = {{"n_modes", c.oracle.n_modes}};
  j["tolerances"] = {{"quad_abs", c.tol.quad_abs},
                     {"quad_rel", c.tol.quad_rel},
                     {"tabulation_rel", c.tol.tabulation_rel},
                     {"kernel_tail", c.tol.kernel_tail},
                     {"step", c.tol.step}};
  return j;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("ConfigFileUnreadable", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert to line/column
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)),
                     std::istreambuf_iterator<char>());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("MalformedJson",
                          path + ":" + std::to_string(line) + ":" +
                              std::to_string(col) + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<std::string> preset_names() { return {"fig3-weak", "fig3-strong"}; }

SystemConfig preset_config(const std::string& name) {
  double h = 0.0, d = 0.0;
  SystemConfig c;
  if (name == "fig3-weak") {
    h = 10.0;
    d = 4.0;
    c.time.t_max = 20000.0;
    c.time.dt = 0.05;
    c.time.output_every = 20;
    c.tau_max = 240.0;
  } else if (name == "fig3-strong") {
    h = 1.0;
    d = 1.0;
    c.time.t_max = 150.0;
    c.time.dt = 0.005;
    c.time.output_every = 5;
    c.tau_max = 150.0;
  } else {
    throw ValidationError("UnknownPreset",
                          "preset must be fig3-weak or fig3-strong");
  }
  const double omega = 3.525;
  const Vec3 mu(0.0, 0.0, 10.0);
  c.emitters = {Emitter::from_debye(Vec3(0.0, 0.0, h), omega, mu),
                Emitter::from_debye(Vec3(d, 0.0, h), omega, mu)};
  c.environment = DrudeHalfSpace{5.0, 0.1};
  c.method = Method::Fqd;
  c.rwa = false;
  c.frequency.omega_min = 0.0;
  c.frequency.omega_max = 35.0;
  c.frequency.n_points = 1500;
  return c;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          int stride) {
  const std::size_t n = traj.n_emitters();
  os << "t";
  for (std::size_t e = 0; e < n; ++e)
    os << ",Re_C_" << (e + 1) << ",Im_C_" << (e + 1);
  for (std::size_t e = 0; e < n; ++e) os << ",P_" << (e + 1);
  os << ",P_total\n";
  if (stride < 1) stride = 1;
  const std::size_t last = traj.times.size() - 1;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (i % stride != 0 && i != last) continue;
    os << format_g17(traj.times[i]);
    for (std::size_t e = 0; e < n; ++e)
      os << ',' << format_g17(traj.amplitudes[e][i].real()) << ','
         << format_g17(traj.amplitudes[e][i].imag());
    for (std::size_t e = 0; e < n; ++e)
      os << ',' << format_g17(traj.population(e, i));
    os << ',' << format_g17(traj.total_population(i)) << '\n';
  }
}

void write_weak_report_csv(std::ostream& os,
                           const WeakCouplingReport& report) {
  const int n = static_cast<int>(report.gamma.size());
  os << "kind,i,j,gamma_ev,delta_sc_e_ev,delta_sc_g_ev,re_v_rddi_ev,"
        "im_v_rddi_ev,v_orc_ev,v_qc_ev,re_v_ddi_ev,im_v_ddi_ev,"
        "re_v_ddi_rwa_ev,im_v_ddi_rwa_ev,re_ddi_ratio\n";
  for (int i = 0; i < n; ++i) {
    os << "emitter," << (i + 1) << ",," << format_g17(report.gamma[i]) << ','
       << format_g17(report.shift_e[i]) << ','
       << format_g17(report.shift_g[i]) << ",,,,,,,,,\n";
  }
  const auto ddi = report.v_ddi();
  const auto ddi_rwa = report.v_ddi_rwa();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double ratio = ddi_rwa(i, j).real() != 0.0
                               ? ddi(i, j).real() / ddi_rwa(i, j).real()
                               : 0.0;
      os << "pair," << (i + 1) << ',' << (j + 1) << ",,,,"
         << format_g17(report.v_rddi(i, j).real()) << ','
         << format_g17(report.v_rddi(i, j).imag()) << ','
         << format_g17(report.v_orc(i, j)) << ','
         << format_g17(report.v_qc(i, j)) << ','
         << format_g17(ddi(i, j).real()) << ','
         << format_g17(ddi(i, j).imag()) << ','
         << format_g17(ddi_rwa(i, j).real()) << ','
         << format_g17(ddi_rwa(i, j).imag()) << ',' << format_g17(ratio)
         << '\n';
    }
  }
}

void write_greens_csv(std::ostream& os, const std::vector<double>& omegas,
                      const std::vector<Mat3c>& tensors,
                      const std::vector<double>& j_values) {
  static const char* comp[3] = {"x", "y", "z"};
  os << "omega_ev";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      os << ",re_g_" << comp[r] << comp[c] << ",im_g_" << comp[r] << comp[c];
  os << ",j_ev\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    os << format_g17(omegas[i]);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        os << ',' << format_g17(tensors[i](r, c).real()) << ','
           << format_g17(tensors[i](r, c).imag());
    os << ',' << format_g17(j_values[i]) << '\n';
  }
}

std::string config_hash(const SystemConfig& config) {
  const std::string dump = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["tool"] = "mqed";
  j["version"] = "0.1.0";
  j["command"] = m.command;
  j["config"] = config_to_json(m.config);
  j["config_hash"] = config_hash(m.config);
  j["timings_ms"] = m.timings_ms;
  j["outputs"] = m.outputs;
  if (!m.sub_hashes.empty()) j["sub_config_hashes"] = m.sub_hashes;
  return j;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("OutputUnwritable", "cannot write " + path);
  out << manifest_to_json(m).dump(2) << '\n';
}

int trajectory_header_emitters(const std::string& header_line) {
  std::vector<std::string> cols;
  std::stringstream ss(header_line);
  std::string tok;
  while (std::getline(ss, tok, ',')) cols.push_back(tok);
  if (cols.size() < 4 || cols.front() != "t" || cols.back() != "P_total")
    throw ValidationError("UnrecognizedHeader",
                          "not a trajectory CSV header: " + header_line);
  // t + 2N amplitude columns + N population columns + total
  const int n = static_cast<int>((cols.size() - 2) / 3);
  if (static_cast<int>(cols.size()) != 2 + 3 * n)
    throw ValidationError("UnrecognizedHeader",
                          "column count does not match the trajectory "
                          "layout");
  for (int e = 0; e < n; ++e) {
    if (cols[1 + 2 * e] != "Re_C_" + std::to_string(e + 1) ||
        cols[2 + 2 * e] != "Im_C_" + std::to_string(e + 1) ||
        cols[1 + 2 * n + e] != "P_" + std::to_string(e + 1))
      throw ValidationError("UnrecognizedHeader",
                            "unexpected column names in trajectory CSV");
  }
  return n;
}

std::string make_plot_script(const std::vector<std::string>& csv_paths) {
  if (csv_paths.empty())
    throw ValidationError("UnrecognizedHeader", "no CSV inputs");
  int n = -1;
  for (const auto& p : csv_paths) {
    std::ifstream in(p);
    if (!in)
      throw ValidationError("ConfigFileUnreadable", "cannot open " + p);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const int ne = trajectory_header_emitters(header);
    if (n < 0) n = ne;
    if (ne != n)
      throw ValidationError("UnrecognizedHeader",
                            "emitter counts differ between CSVs");
  }
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
     << "# population-dynamics panels generated by mqed plotscript\n"
     << "import csv\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "paths = [\n";
  for (const auto& p : csv_paths) os << "    " << std::quoted(p) << ",\n";
  os << "]\n"
     << "n_emitters = " << n << "\n"
     << "fig, axes = plt.subplots(1, n_emitters + 1, figsize=(4 * "
        "(n_emitters + 1), 3.2), sharex=True)\n"
     << "for path in paths:\n"
     << "    with open(path) as fh:\n"
     << "        rows = list(csv.DictReader(fh))\n"
     << "    t = [float(r[\"t\"]) for r in rows]\n"
     << "    for e in range(n_emitters):\n"
     << "        p = [float(r[f\"P_{e+1}\"]) for r in rows]\n"
     << "        axes[e].plot(t, p, label=path)\n"
     << "        axes[e].set_title(f\"emitter {e+1}\")\n"
     << "    total = [float(r[\"P_total\"]) for r in rows]\n"
     << "    axes[n_emitters].plot(t, total, label=path)\n"
     << "    axes[n_emitters].set_title(\"total\")\n"
     << "for ax in axes:\n"
     << "    ax.set_xlabel(\"t (hbar/eV)\")\n"
     << "    ax.set_ylabel(\"population\")\n"
     << "axes[0].legend(fontsize=6)\n"
     << "fig.tight_layout()\n"
     << "plt.show()\n";
  return os.str();
}

}  // namespace mqed::io
