#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <functional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgdirac/errors.hpp"
#include "qgdirac/graph.hpp"
#include "qgdirac/inequalities.hpp"
#include "qgdirac/mesh.hpp"
#include "qgdirac/nlde.hpp"
#include "qgdirac/nlse.hpp"
#include "qgdirac/operators.hpp"
#include "qgdirac/spectral.hpp"
#include "qgdirac/sweep.hpp"

using json = nlohmann::json;
using namespace qgdirac;

namespace {

// Shared problem description. Every field can come from --config (same key
// names) or from an inline flag; inline flags win.
struct Common {
  std::string config;
  std::string graph = "line";
  double m = 1.0;
  double p = 3.0;
  double c = 10.0;
  double h = 0.01;
  double L = 40.0;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;
};

void add_problem_flags(CLI::App* sub, Common& o, bool with_c, bool with_p) {
  sub->add_option("--config", o.config, "JSON file with any of the keys graph, m, p, c, h, trunc_length, seed");
  sub->add_option("--graph", o.graph, "graph file or built-in name (line, interval, star3, pendant_loop)")
      ->capture_default_str();
  sub->add_option("-m,--mass-param", o.m, "particle mass m > 0 (dimensionless)")->capture_default_str();
  if (with_p) sub->add_option("-p,--power", o.p, "nonlinearity exponent, 2 < p < 6")->capture_default_str();
  if (with_c) sub->add_option("-c,--speed", o.c, "speed of light c > 0 (dimensionless)")->capture_default_str();
  sub->add_option("--spacing", o.h, "target mesh spacing (length units)")->capture_default_str();
  sub->add_option("--trunc-length", o.L, "half-line truncation length L (length units)")->capture_default_str();
}

void merge_config(CLI::App* sub, Common& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + o.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  o.base_dir = std::filesystem::path(o.config).parent_path();
  auto given = [&](const char* flag) {
    auto* opt = sub->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  };
  for (auto& [key, value] : j.items()) {
    if (key == "graph") {
      if (!given("--graph")) o.graph = value.get<std::string>();
    } else if (key == "m") {
      if (!given("--mass-param")) o.m = value.get<double>();
    } else if (key == "p") {
      if (!given("--power")) o.p = value.get<double>();
    } else if (key == "c") {
      if (!given("--speed")) o.c = value.get<double>();
    } else if (key == "h") {
      if (!given("--spacing")) o.h = value.get<double>();
    } else if (key == "trunc_length") {
      if (!given("--trunc-length")) o.L = value.get<double>();
    } else if (key == "seed") {
      if (!given("--seed")) o.seed = value.get<std::uint64_t>();
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  }
}

std::shared_ptr<const MetricGraph> load_graph(const Common& o) {
  SweepConfig probe;
  probe.graph = o.graph;
  probe.base_dir = o.base_dir;
  return std::make_shared<const MetricGraph>(build_graph(probe.graph_spec()));
}

std::shared_ptr<const ConstraintBasis> load_basis(const Common& o) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(load_graph(o), o.h, o.L));
  return std::make_shared<const ConstraintBasis>(constraint_basis(mesh));
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

json report_json(const InequalityReport& r) {
  return {{"id", r.id},
          {"samples", r.samples},
          {"max_ratio", r.max_ratio},
          {"certified_bound", std::isfinite(r.certified_bound) ? json(r.certified_bound) : json(nullptr)},
          {"violations", r.violations},
          {"worst_sample", r.worst_sample}};
}

int cmd_validate(const Common& o) {
  auto g = load_graph(o);
  json edges = json::array();
  for (const auto& e : g->edges())
    edges.push_back({{"start", g->vertices()[e.start]},
                     {"end", e.bounded() ? json(g->vertices()[e.end]) : json(nullptr)},
                     {"length", e.bounded() ? json(e.length) : json(nullptr)}});
  json deg = json::object();
  for (int v = 0; v < g->vertex_count(); ++v) deg[g->vertices()[v]] = g->degree(v);
  print({{"valid", true},
         {"vertices", g->vertex_count()},
         {"edges", g->edge_count()},
         {"half_lines", g->half_line_count()},
         {"core_length", g->core_length()},
         {"degrees", deg},
         {"edge_list", edges}});
  return 0;
}

int cmd_spectrum(const Common& o, int count) {
  auto basis = load_basis(o);
  DiracOperator op(basis, o.m, o.c);
  auto dec = eigendecompose(op);
  const auto& nu = dec.eigenvalues();
  json neg = json::array(), pos = json::array();
  for (int i = 0; i < std::min(count, dec.negative_count()); ++i) neg.push_back(nu[dec.negative_count() - 1 - i]);
  for (int i = 0; i < std::min(count, dec.positive_count()); ++i) pos.push_back(nu[dec.negative_count() + i]);
  print({{"dim", dec.dim()},
         {"rest_energy", dec.rest_energy()},
         {"min_abs_eigenvalue", dec.min_abs_eigenvalue()},
         {"gap_ratio", dec.min_abs_eigenvalue() / dec.rest_energy()},
         {"negative_count", dec.negative_count()},
         {"positive_count", dec.positive_count()},
         {"lowest_positive", pos},
         {"highest_negative", neg}});
  return 0;
}

void write_profile(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  body(out);
}

int cmd_nlse(const Common& o, double mass, const std::string& out) {
  NlseOptions opts;
  opts.mass = mass;
  auto sol = solve_nlse(load_graph(o), o.m, o.p, o.h, o.L, opts);
  print({{"sign_convention", kNlseSignConvention},
         {"lambda", sol.lambda},
         {"mass", sol.mass},
         {"energy", sol.energy},
         {"residual", sol.residual},
         {"kirchhoff", sol.kirchhoff},
         {"flow_steps", sol.flow_steps},
         {"newton_iters", sol.newton_iters}});
  if (!out.empty()) {
    write_profile(out, [&](std::ostream& os) {
      os << "edge,x,g\n";
      char buf[96];
      for (std::size_t ge = 0; ge < sol.g.mesh->edges.size(); ++ge)
        for (int j = 0; j <= sol.g.mesh->edges[ge].cells; ++j) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", ge, sol.g.mesh->edges[ge].node_x(j),
                        sol.g.at(static_cast<int>(ge), j));
          os << buf;
        }
    });
  }
  return 0;
}

int cmd_nlde(const Common& o, const std::string& out) {
  auto basis = load_basis(o);
  auto nlse = solve_nlse(basis->mesh, o.m, o.p);
  DiracOperator op(basis, o.m, o.c);
  auto sol = solve_nlde(op, o.p, initial_guess(nlse, o.m, o.c));
  auto id = energy_identity(op, sol);
  print({{"c", sol.c},
         {"omega", sol.omega},
         {"omega_minus_mc2", sol.omega - o.m * o.c * o.c},
         {"nlse_lambda_over_m", nlse.lambda / o.m},
         {"mass", sol.mass},
         {"action", sol.action},
         {"residual", sol.residual},
         {"energy_identity_gap", id.relative_gap()},
         {"newton_iters", sol.newton_iters}});
  if (!out.empty()) {
    write_profile(out, [&](std::ostream& os) {
      const Mesh& mesh = *sol.u.mesh;
      os << "edge,x,component,value\n";
      char buf[128];
      for (std::size_t ge = 0; ge < mesh.edges.size(); ++ge) {
        const auto& eg = mesh.edges[ge];
        for (int j = 0; j <= eg.cells; ++j) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g,1,%.17g\n", ge, eg.node_x(j),
                        sol.u.upper_at(static_cast<int>(ge), j).real());
          os << buf;
        }
        for (int j = 0; j < eg.cells; ++j) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g,2,%.17g\n", ge, eg.mid_x(j),
                        sol.u.lower[eg.first_mid + j].imag());
          os << buf;
        }
      }
    });
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, bool quiet) {
  if (config_path.empty()) throw Error(ErrorCode::InvalidConfig, "sweep requires --config");
  auto cfg = read_sweep_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  auto report = run_sweep(cfg);
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  emit_report(report, dir);
  if (!quiet) std::cout << sweep_csv(report);
  std::cerr << "wrote " << (dir / "sweep.csv").string() << " (" << report.rows.size() << " rows, "
            << report.wall_seconds << " s)\n";
  if (report.failed) {
    std::cerr << "sweep failed: " << report.error << '\n';
    return 3;
  }
  return 0;
}

int cmd_ec(const Common& o, const std::string& family, double a, int grid) {
  auto basis = load_basis(o);
  DiracOperator op(basis, o.m, o.c);
  auto dec = eigendecompose(op);
  TestFamily fam = family == "tent" ? TestFamily::Tent : TestFamily::Sine;
  auto e = estimate_ec(dec, o.p, fam, a, grid);
  print({{"family", family},
         {"a", e.a},
         {"estimate", e.estimate},
         {"t_at_max", e.t_at_max},
         {"t_max", e.t_max},
         {"bound", e.bound},
         {"corrected_bound", e.corrected_bound},
         {"slack", e.slack},
         {"half_rest_energy", e.half_rest_energy},
         {"estimate_minus_half_rest_energy", e.estimate - e.half_rest_energy},
         {"ray_monotone", e.ray_monotone}});
  return 0;
}

int cmd_inequalities(const Common& o, int samples) {
  auto basis = load_basis(o);
  DiracOperator op(basis, o.m, o.c);
  auto dec = eigendecompose(op);
  auto bumps = random_bump_fields(basis->mesh, samples, o.seed + 11);
  auto fields = random_fields(dec, samples, o.seed);
  auto support = check_support_inequality(bumps, o.p);
  auto gn = estimate_gn_constants(dec, o.p, fields);
  json out = {{"support", report_json(support)},
              {"gn_form", report_json(gn.form)},
              {"gn_sobolev", report_json(gn.sobolev)},
              {"gn_sup", report_json(gn.sup)},
              {"monotone", report_json(gn.monotone)}};
  if (o.m * o.c >= 1.0) {
    auto pr = check_projector_bound(dec, o.p, gn.s_p(), fields);
    out["projector"] = report_json(pr.bound);
    out["projector_intermediate"] = report_json(pr.intermediate);
  } else {
    out["projector"] = "skipped: requires c >= 1/m";
  }
  print(out);
  int violations = support.violations + gn.form.violations + gn.sobolev.violations + gn.sup.violations +
                   gn.monotone.violations;
  return violations == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized solutions of nonlinear Dirac and Schrodinger equations on metric graphs.\n"
               "All quantities are dimensionless: lengths in graph length units, m and c as given, energies "
               "and frequencies in the units of mc^2."};
  app.require_subcommand(1);

  Common o;
  auto* validate = app.add_subcommand("validate-graph", "parse and validate a graph description");
  validate->add_option("--config", o.config, "JSON file with a graph key");
  validate->add_option("graph", o.graph, "graph file or built-in name (line, interval, star3, pendant_loop)");

  int count = 6;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the discrete Dirac operator nearest the gap");
  add_problem_flags(spectrum, o, true, false);
  spectrum->add_option("--count", count, "eigenvalues listed on each side of the gap")->capture_default_str();

  double mass = 1.0;
  std::string out;
  auto* nlse = app.add_subcommand("solve-nlse", "ground state of the limit Schrodinger problem at fixed L2 mass");
  add_problem_flags(nlse, o, false, true);
  nlse->add_option("--mass", mass, "prescribed L2 mass of g")->capture_default_str();
  nlse->add_option("--out", out, "CSV file for the profile (edge, x, g)");

  auto* nlde = app.add_subcommand("solve-nlde", "normalized NLDE solution (unit L2 mass) seeded from the limit problem");
  add_problem_flags(nlde, o, true, true);
  nlde->add_option("--out", out, "CSV file for the spinor profile (edge, x, component, value)");

  std::string out_dir;
  bool quiet = false;
  auto* sweep = app.add_subcommand("sweep", "nonrelativistic-limit sweep over a list of speeds c");
  sweep->add_option("--config", o.config,
                    "JSON config: graph, m, p, c_list (ascending), h, trunc_length, seed, out_dir")
      ->required();
  sweep->add_option("--out-dir", out_dir, "override out_dir from the config");
  sweep->add_flag("--quiet", quiet, "do not echo the CSV to stdout");

  std::string family = "sine";
  double a = 1.0;
  int grid = 512;
  auto* ec = app.add_subcommand("estimate-ec", "sampled minimax level along a test ray, with the analytic bound");
  add_problem_flags(ec, o, true, true);
  ec->add_option("--family", family, "test family")->check(CLI::IsMember({"sine", "tent"}))->capture_default_str();
  ec->add_option("--a", a, "tent slope a > 0 (tent family)")->capture_default_str();
  ec->add_option("--grid", grid, "points on the t-grid")->capture_default_str();

  int samples = 1000;
  auto* ineq = app.add_subcommand("check-inequalities", "randomized support, GN and projector inequality suites");
  add_problem_flags(ineq, o, true, true);
  ineq->add_option("--samples", samples, "random fields per suite")->capture_default_str();
  ineq->add_option("--seed", o.seed, "RNG seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      merge_config(validate, o);
      return cmd_validate(o);
    }
    if (*sweep) return cmd_sweep(o.config, out_dir, quiet);
    CLI::App* sub = app.get_subcommands().front();
    merge_config(sub, o);
    if (*spectrum) return cmd_spectrum(o, count);
    if (*nlse) return cmd_nlse(o, mass, out);
    if (*nlde) return cmd_nlde(o, out);
    if (*ec) return cmd_ec(o, family, a, grid);
    if (*ineq) return cmd_inequalities(o, samples);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
