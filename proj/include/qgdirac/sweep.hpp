#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qgdirac/graph.hpp"
#include "qgdirac/nlde.hpp"

namespace qgdirac {

/// Sweep configuration. JSON keys: graph, m, p, c_list, h, trunc_length,
/// seed, out_dir. `graph` is a path to a graph file (relative paths resolve
/// against the config file) or one of the built-in names line, interval,
/// star3, pendant_loop. Unknown keys are rejected.
struct SweepConfig {
  std::string graph = "line";
  double m = 1.0;
  double p = 3.0;
  std::vector<double> c_list;
  double h = 0.01;
  double trunc_length = 40.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::filesystem::path base_dir;  ///< directory of the config file, for relative graph paths

  GraphSpec graph_spec() const;
  std::string to_json() const;
};

SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
SweepConfig read_sweep_config(const std::filesystem::path& path);

struct SweepRow {
  double c = 0.0;
  double omega = 0.0;
  double omega_minus_mc2 = 0.0;
  double l2_u2 = 0.0;
  double h1_u2 = 0.0;
  double h1_u1_minus_g = 0.0;
  double action = 0.0;
  double residual = 0.0;
  int newton_iters = 0;
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepRow> rows;  ///< ascending c
  double nlse_lambda = 0.0;
  double nlse_energy = 0.0;
  double nlse_residual = 0.0;
  double h1_u2_slope = 0.0;  ///< NaN when fewer than three rows
  bool failed = false;
  std::string error;
  double wall_seconds = 0.0;
  std::vector<NldeSolution> solutions;  ///< ascending c, parallel to rows
  NlseSolution nlse;
};

/// Solves the limit problem once, then the NLDE for every c by continuation
/// from the largest c. Throws EmptySweep; solver failures mark the report as
/// failed and keep the rows solved so far.
SweepReport run_sweep(const SweepConfig& config);

/// Least-squares slope of log(value) against log(c). Throws InsufficientData
/// for fewer than three points and DomainError for non-positive entries.
double fit_rate(const std::vector<std::pair<double, double>>& series);

inline constexpr const char* kSweepCsvHeader =
    "c,omega,omega_minus_mc2,l2_u2,h1_u2,h1_u1_minus_g,action,residual,newton_iters";

/// Writes sweep.csv, sweep_manifest.json and sweep.gp into `dir`. Throws IoError.
void emit_report(const SweepReport& report, const std::filesystem::path& dir);
std::string sweep_csv(const SweepReport& report);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

}  // namespace qgdirac
