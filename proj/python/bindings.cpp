#include <memory>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qgdirac/errors.hpp"
#include "qgdirac/inequalities.hpp"
#include "qgdirac/nlde.hpp"
#include "qgdirac/nlse.hpp"
#include "qgdirac/sweep.hpp"

namespace py = pybind11;
using namespace qgdirac;

namespace {

GraphSpec resolve(const std::string& graph) {
  SweepConfig cfg;
  cfg.graph = graph;
  return cfg.graph_spec();
}

std::shared_ptr<const MetricGraph> graph_of(const std::string& graph) {
  return std::make_shared<const MetricGraph>(build_graph(resolve(graph)));
}

std::shared_ptr<const ConstraintBasis> basis_of(const std::string& graph, double h, double L) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(graph_of(graph), h, L));
  return std::make_shared<const ConstraintBasis>(constraint_basis(mesh));
}

py::dict graph_summary(const std::string& graph) {
  auto g = graph_of(graph);
  py::dict d;
  d["vertices"] = g->vertices();
  d["edge_count"] = g->edge_count();
  d["half_lines"] = g->half_line_count();
  d["core_length"] = g->core_length();
  return d;
}

py::dict nlse_dict(const NlseSolution& s) {
  py::dict d;
  d["lambda"] = s.lambda;
  d["mass"] = s.mass;
  d["energy"] = s.energy;
  d["residual"] = s.residual;
  d["kirchhoff"] = s.kirchhoff;
  d["flow_steps"] = s.flow_steps;
  d["newton_iters"] = s.newton_iters;
  d["g"] = s.g.values;
  return d;
}

py::dict nlde_dict(const NldeSolution& s) {
  py::dict d;
  d["c"] = s.c;
  d["omega"] = s.omega;
  d["omega_minus_mc2"] = s.omega - s.m * s.c * s.c;
  d["mass"] = s.mass;
  d["action"] = s.action;
  d["residual"] = s.residual;
  d["newton_iters"] = s.newton_iters;
  d["z"] = s.z;
  return d;
}

py::dict sweep_dict(const SweepReport& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["c"] = row.c;
    d["omega"] = row.omega;
    d["omega_minus_mc2"] = row.omega_minus_mc2;
    d["l2_u2"] = row.l2_u2;
    d["h1_u2"] = row.h1_u2;
    d["h1_u1_minus_g"] = row.h1_u1_minus_g;
    d["action"] = row.action;
    d["residual"] = row.residual;
    d["newton_iters"] = row.newton_iters;
    rows.append(d);
  }
  py::dict d;
  d["rows"] = rows;
  d["nlse_lambda"] = r.nlse_lambda;
  d["nlse_energy"] = r.nlse_energy;
  d["h1_u2_slope"] = r.h1_u2_slope;
  d["failed"] = r.failed;
  d["error"] = r.error;
  d["csv"] = sweep_csv(r);
  return d;
}

py::dict report_dict(const InequalityReport& r) {
  py::dict d;
  d["samples"] = r.samples;
  d["max_ratio"] = r.max_ratio;
  d["certified_bound"] = r.certified_bound;
  d["violations"] = r.violations;
  return d;
}

}  // namespace

PYBIND11_MODULE(qgdirac, mod) {
  mod.doc() = "Nonlinear Dirac and Schrodinger ground states on metric graphs";

  py::register_exception<Error>(mod, "QgdiracError", PyExc_RuntimeError);

  mod.def("nlse_sign_convention", [] { return std::string(kNlseSignConvention); });

  mod.def("graph_summary", &graph_summary, py::arg("graph"),
          "Validate a graph file or built-in name and return its vertices, edge count, half-lines and core length.");
  mod.def(
      "graph_json", [](const std::string& graph) { return graph_spec_to_json(resolve(graph)); }, py::arg("graph"));

  mod.def(
      "dirac_spectrum",
      [](const std::string& graph, double m, double c, double h, double L) {
        return Eigen::VectorXd(eigendecompose(DiracOperator(basis_of(graph, h, L), m, c)).eigenvalues());
      },
      py::arg("graph"), py::arg("m") = 1.0, py::arg("c") = 10.0, py::arg("h") = 0.05, py::arg("L") = 5.0,
      "All eigenvalues of the discrete Dirac operator, ascending.");

  mod.def(
      "solve_nlse",
      [](const std::string& graph, double m, double p, double h, double L, double mass) {
        NlseOptions opts;
        opts.mass = mass;
        return nlse_dict(solve_nlse(graph_of(graph), m, p, h, L, opts));
      },
      py::arg("graph"), py::arg("m") = 1.0, py::arg("p") = 3.0, py::arg("h") = 0.01, py::arg("L") = 30.0,
      py::arg("mass") = 1.0);

  mod.def(
      "solve_nlde",
      [](const std::string& graph, double m, double p, const std::vector<double>& c_list, double h, double L) {
        SolverParams params;
        params.m = m;
        params.p = p;
        params.h = h;
        params.L = L;
        params.c_schedule = c_list;
        params.validate();
        auto mesh = std::make_shared<const Mesh>(build_mesh(graph_of(graph), h, L));
        py::list out;
        for (const auto& s : continuation(solve_nlse(mesh, m, p), params)) out.append(nlde_dict(s));
        return out;
      },
      py::arg("graph"), py::arg("m") = 1.0, py::arg("p") = 3.0, py::arg("c_list") = std::vector<double>{10.0},
      py::arg("h") = 0.01, py::arg("L") = 30.0, "NLDE ground states by continuation, ascending c.");

  mod.def(
      "run_sweep", [](const std::string& config_json) { return sweep_dict(run_sweep(parse_sweep_config(config_json))); },
      py::arg("config_json"));

  mod.def(
      "estimate_ec",
      [](const std::string& graph, double m, double c, double p, const std::string& family, double a, double h,
         double L) {
        if (family != "sine" && family != "tent") throw Error(ErrorCode::DomainError, "family must be sine or tent");
        auto dec = eigendecompose(DiracOperator(basis_of(graph, h, L), m, c));
        auto e = estimate_ec(dec, p, family == "sine" ? TestFamily::Sine : TestFamily::Tent, a);
        py::dict d;
        d["estimate"] = e.estimate;
        d["bound"] = e.bound;
        d["corrected_bound"] = e.corrected_bound;
        d["half_rest_energy"] = e.half_rest_energy;
        d["t_at_max"] = e.t_at_max;
        return d;
      },
      py::arg("graph") = "line", py::arg("m") = 1.0, py::arg("c") = 50.0, py::arg("p") = 4.0,
      py::arg("family") = "sine", py::arg("a") = 1.0, py::arg("h") = 0.02, py::arg("L") = 1.0);

  mod.def(
      "check_inequalities",
      [](const std::string& graph, double m, double c, double p, int samples, std::uint64_t seed, double h, double L) {
        auto dec = eigendecompose(DiracOperator(basis_of(graph, h, L), m, c));
        auto fields = random_fields(dec, samples, seed);
        auto gn = estimate_gn_constants(dec, p, fields);
        auto proj = check_projector_bound(dec, p, gn.s_p(), fields);
        py::dict d;
        d["support"] = report_dict(check_support_inequality(random_bump_fields(dec.basis().mesh, samples, seed), p));
        d["form"] = report_dict(gn.form);
        d["sobolev"] = report_dict(gn.sobolev);
        d["sup"] = report_dict(gn.sup);
        d["monotone"] = report_dict(gn.monotone);
        d["projector"] = report_dict(proj.bound);
        return d;
      },
      py::arg("graph") = "line", py::arg("m") = 1.0, py::arg("c") = 10.0, py::arg("p") = 3.0,
      py::arg("samples") = 200, py::arg("seed") = 0, py::arg("h") = 0.02, py::arg("L") = 3.0);

  mod.def("coefficient_scale", &coefficient_scale, py::arg("m"), py::arg("p"));
  mod.def("scaled_mass", &scaled_mass, py::arg("m"), py::arg("p"));
  mod.def("m0_threshold", &m0_threshold, py::arg("p"), py::arg("ell"));
  mod.def("a_priori_constant", &a_priori_constant, py::arg("sigma"), py::arg("m"), py::arg("p"), py::arg("s_p"),
          py::arg("s_inf"));
  mod.def("tent_derivative_norm2", &tent_derivative_norm2, py::arg("half_lines"), py::arg("core_length"),
          py::arg("a"));
}
