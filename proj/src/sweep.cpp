#include "qgdirac/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "qgdirac/errors.hpp"

namespace qgdirac {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {"graph", "m", "p", "c_list", "h", "trunc_length", "seed", "out_dir"};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GraphSpec SweepConfig::graph_spec() const {
  std::filesystem::path path(graph);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  if (std::filesystem::exists(path)) return read_graph_spec(path);
  if (graph == "line") return graphs::line(1.0);
  if (graph == "interval") return graphs::interval(1.0);
  if (graph == "star3") return graphs::star({1.0, 1.0, 1.0}, 0);
  if (graph == "pendant_loop") return graphs::pendant_loop();
  throw Error(ErrorCode::InvalidConfig, "graph '" + graph + "' is neither a file nor a built-in name");
}

std::string SweepConfig::to_json() const {
  json j;
  j["graph"] = graph;
  j["m"] = m;
  j["p"] = p;
  j["c_list"] = c_list;
  j["h"] = h;
  j["trunc_length"] = trunc_length;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
  for (const char* key : {"graph", "m", "p", "c_list", "h", "trunc_length"}) {
    if (!j.contains(key)) throw Error(ErrorCode::InvalidConfig, std::string("missing config key '") + key + "'");
  }
  SweepConfig cfg;
  cfg.base_dir = base_dir;
  try {
    cfg.graph = j.at("graph").get<std::string>();
    cfg.m = j.at("m").get<double>();
    cfg.p = j.at("p").get<double>();
    cfg.c_list = j.at("c_list").get<std::vector<double>>();
    cfg.h = j.at("h").get<double>();
    cfg.trunc_length = j.at("trunc_length").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad config value: ") + ex.what());
  }
  if (!(cfg.m > 0.0)) throw Error(ErrorCode::InvalidConfig, "m must be positive");
  if (!(cfg.p > 2.0 && cfg.p < 6.0)) throw Error(ErrorCode::InvalidConfig, "p must lie in (2, 6)");
  if (!(cfg.h > 0.0) || !(cfg.trunc_length > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "h and trunc_length must be positive");
  }
  for (std::size_t i = 0; i < cfg.c_list.size(); ++i) {
    if (!(cfg.c_list[i] > 0.0)) throw Error(ErrorCode::InvalidConfig, "c_list entries must be positive");
    if (i > 0 && !(cfg.c_list[i] > cfg.c_list[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "c_list must be strictly ascending");
    }
  }
  return cfg;
}

SweepConfig read_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str(), path.parent_path());
}

double fit_rate(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 3) throw Error(ErrorCode::InsufficientData, "slope fit needs at least three points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(series.size());
  for (const auto& [c, v] : series) {
    if (!(c > 0.0) || !(v > 0.0)) throw Error(ErrorCode::DomainError, "log-log fit needs positive data");
    double x = std::log(c), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (den == 0.0) throw Error(ErrorCode::InsufficientData, "all abscissae coincide");
  return (n * sxy - sx * sy) / den;
}

SweepReport run_sweep(const SweepConfig& config) {
  if (config.c_list.empty()) throw Error(ErrorCode::EmptySweep, "c_list is empty");
  const auto start = std::chrono::steady_clock::now();
  SweepReport report;
  report.config = config;
  report.h1_u2_slope = std::numeric_limits<double>::quiet_NaN();

  auto graph = std::make_shared<const MetricGraph>(build_graph(config.graph_spec()));
  auto mesh = std::make_shared<const Mesh>(build_mesh(graph, config.h, config.trunc_length));
  auto basis = std::make_shared<const ConstraintBasis>(constraint_basis(mesh));

  std::vector<double> speeds = config.c_list;
  std::sort(speeds.begin(), speeds.end(), std::greater<>());
  std::vector<NldeSolution> solved;
  try {
    report.nlse = solve_nlse(mesh, config.m, config.p);
    report.nlse_lambda = report.nlse.lambda;
    report.nlse_energy = report.nlse.energy;
    report.nlse_residual = report.nlse.residual;
    NldeGuess guess = initial_guess(report.nlse, config.m, speeds.front());
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      if (i > 0) guess = continuation_seed(solved.back(), *basis, speeds[i]);
      DiracOperator op(basis, config.m, speeds[i]);
      solved.push_back(solve_nlde(op, config.p, guess));
    }
  } catch (const Error& ex) {
    report.failed = true;
    report.error = ex.what();
  }
  std::reverse(solved.begin(), solved.end());

  const Eigen::VectorXcd g = report.nlse.g.mesh ? Eigen::VectorXcd(report.nlse.g.values.cast<cplx>())
                                                : Eigen::VectorXcd::Zero(mesh->node_count);
  for (const auto& s : solved) {
    SweepRow row;
    row.c = s.c;
    row.omega = s.omega;
    row.omega_minus_mc2 = s.omega - s.m * s.c * s.c;
    SpinorField lower = SpinorField::zeros(mesh);
    lower.lower = s.u.lower;
    row.l2_u2 = norm(lower, NormKind::L2);
    row.h1_u2 = norm(lower, NormKind::H1);
    SpinorField diff = SpinorField::zeros(mesh);
    diff.upper = s.u.upper - g;
    row.h1_u1_minus_g = norm(diff, NormKind::H1);
    row.action = s.action;
    row.residual = s.residual;
    row.newton_iters = s.newton_iters;
    report.rows.push_back(row);
  }
  report.solutions = std::move(solved);
  if (report.rows.size() != config.c_list.size()) report.failed = true;
  if (report.rows.size() >= 3) {
    std::vector<std::pair<double, double>> series;
    for (const auto& r : report.rows) series.emplace_back(r.c, r.h1_u2);
    report.h1_u2_slope = fit_rate(series);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += fmt17(r.c) + "," + fmt17(r.omega) + "," + fmt17(r.omega_minus_mc2) + "," + fmt17(r.l2_u2) + "," +
           fmt17(r.h1_u2) + "," + fmt17(r.h1_u1_minus_g) + "," + fmt17(r.action) + "," + fmt17(r.residual) + "," +
           std::to_string(r.newton_iters) + "\n";
  }
  return out;
}

void emit_report(const SweepReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + (dir / name).string());
  };
  write("sweep.csv", sweep_csv(report));

  json manifest;
  manifest["config"] = json::parse(report.config.to_json());
  manifest["versions"] = {{"qgdirac", QGDIRAC_VERSION},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"compiler", __VERSION__},
                          {"cxx_standard", __cplusplus}};
  manifest["wall_seconds"] = report.wall_seconds;
  manifest["tolerances"] = {{"nlde_residual", 1e-10}, {"nlse_residual", 1e-10}, {"nlse_flow_energy_drop", 1e-12},
                            {"nlse_mass", 1e-12}, {"max_newton_iterations", 50}};
  manifest["sign_convention"] = kNlseSignConvention;
  manifest["nlse"] = {{"lambda", report.nlse_lambda}, {"energy", report.nlse_energy},
                      {"residual", report.nlse_residual}};
  manifest["h1_u2_slope"] = std::isnan(report.h1_u2_slope) ? json(nullptr) : json(report.h1_u2_slope);
  manifest["rows"] = report.rows.size();
  manifest["expected_rows"] = report.config.c_list.size();
  manifest["failed"] = report.failed;
  manifest["error"] = report.error;
  manifest["csv"] = "sweep.csv";
  write("sweep_manifest.json", manifest.dump(2) + "\n");

  std::string gp =
      "# gnuplot script for sweep.csv\n"
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set logscale xy\n"
      "set xlabel 'c'\n"
      "set terminal pngcairo size 900,600\n"
      "set output 'sweep_u2.png'\n"
      "plot 'sweep.csv' using 1:5 with linespoints title 'H1 norm of u2', \\\n"
      "     'sweep.csv' using 1:4 with linespoints title 'L2 norm of u2', \\\n"
      "     'sweep.csv' using 1:6 with linespoints title 'H1 norm of u1 - g'\n"
      "unset logscale y\n"
      "set output 'sweep_omega.png'\n"
      "set ylabel 'omega - m c^2'\n"
      "plot 'sweep.csv' using 1:3 with linespoints title 'omega - m c^2', " +
      fmt17(report.nlse_lambda / (2.0 * report.config.m)) + " title 'lambda/(2m)', " +
      fmt17(report.nlse_lambda / report.config.m) + " title 'lambda/m'\n";
  write("sweep.gp", gp);
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kSweepCsvHeader) throw Error(ErrorCode::IoError, "unexpected CSV header in " + path.string());
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw Error(ErrorCode::IoError, "CSV row with " + std::to_string(cells.size()) + " columns");
    SweepRow r;
    double* fields[] = {&r.c, &r.omega, &r.omega_minus_mc2, &r.l2_u2, &r.h1_u2, &r.h1_u1_minus_g, &r.action,
                        &r.residual};
    for (int i = 0; i < 8; ++i) *fields[i] = std::strtod(cells[i].c_str(), nullptr);
    r.newton_iters = std::stoi(cells[8]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace qgdirac
