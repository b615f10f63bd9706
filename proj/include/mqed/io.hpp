#pragma once

// Configuration ingestion (strict JSON schema), CSV emission, run manifests,
// presets, and plot-script generation.

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqed/model.hpp"
#include "mqed/weak_coupling.hpp"

namespace mqed::io {

// Strict parse: unknown keys are rejected, not ignored.
SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& config);
SystemConfig load_config_file(const std::string& path);

// Built-in scenario presets: "fig3-weak" (h=10 nm, d=4 nm) and
// "fig3-strong" (h=1 nm, d=1 nm), a pair of identical z-oriented 10 D
// dipoles at 3.525 eV above the Drude surface.
SystemConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Trajectory CSV: header t,Re_C_1,Im_C_1,...,P_1,...,P_total with fixed
// 17-significant-digit formatting; `stride` thins rows (the last row is
// always written).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          int stride = 1);

// One row per emitter, one per ordered pair (includes the
// Re V_DDI / Re V_DDI~ ratio column).
void write_weak_report_csv(std::ostream& os, const WeakCouplingReport& report);

// (omega, Re/Im G_ij, J) rows for one emitter pair and Green's-function
// part.
void write_greens_csv(std::ostream& os, const std::vector<double>& omegas,
                      const std::vector<Mat3c>& tensors,
                      const std::vector<double>& j_values);

// FNV-1a over the canonical (sorted-key) JSON dump.
std::string config_hash(const SystemConfig& config);

struct RunManifest {
  SystemConfig config;
  std::string command;
  std::map<std::string, double> timings_ms;
  std::vector<std::string> outputs;
  std::vector<std::string> sub_hashes;  // sweep sub-config hashes
};

nlohmann::json manifest_to_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

// Self-contained matplotlib script overlaying the population columns of the
// given trajectory CSVs (one panel per emitter plus the total). Throws
// UnrecognizedHeader for non-trajectory CSVs.
std::string make_plot_script(const std::vector<std::string>& csv_paths);

// Parses a trajectory CSV header; returns the emitter count.
int trajectory_header_emitters(const std::string& header_line);

std::string format_g17(double x);

}  // namespace mqed::io
