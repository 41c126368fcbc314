#include "qgdirac/nlse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "qgdirac/errors.hpp"
#include "qgdirac/nonlinearity.hpp"

namespace qgdirac {

namespace {

struct Problem {
  std::shared_ptr<const ConstraintBasis> basis;
  SparseMatrix k;
  CoreNonlinearity psi;
  double m, p;

  Problem(std::shared_ptr<const Mesh> mesh, double m_, double p_)
      : basis(std::make_shared<ConstraintBasis>(constraint_basis(std::move(mesh)))),
        k(assemble_schrodinger(basis).matrix()),
        psi(basis, p_, false),
        m(m_),
        p(p_) {}

  double energy(const Eigen::VectorXd& y) const { return 0.5 * y.dot(k * y) - 2.0 * m * psi.value(y); }
  Eigen::VectorXd operator_part(const Eigen::VectorXd& y) const { return k * y - 2.0 * m * psi.gradient(y); }
};

void check_params(double m, double p) {
  if (!(m > 0.0)) throw Error(ErrorCode::PreconditionViolated, "m must be positive");
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorCode::DomainError, "p must lie in (2, 6)");
}

Eigen::VectorXd sine_seed(const Problem& pb, int edge) {
  const Mesh& mesh = *pb.basis->mesh;
  const MetricGraph& graph = *mesh.graph;
  if (edge < 0) edge = graph.longest_core_edge();
  if (edge >= graph.edge_count() || graph.edges()[edge].kind != EdgeKind::Bounded) {
    throw Error(ErrorCode::PreconditionViolated, "seed edge must be a bounded edge");
  }
  const double len = graph.edges()[edge].length;
  ScalarField f = ScalarField::zeros(pb.basis->mesh);
  for (const auto& g : mesh.edges) {
    if (g.edge != edge) continue;
    for (int j = 1; j < g.cells; ++j) {
      int dof = g.node_dofs[j];
      if (dof >= 0) f.values[dof] = std::sin(std::numbers::pi * g.node_x(j) / len);
    }
  }
  return pb.basis->to_coords(f);
}

void check_decay(const Mesh& mesh, const ScalarField& g, double tol) {
  double outer = 0.0;
  for (const auto& e : mesh.edges) {
    if (!e.far_end_truncated) continue;
    for (int j = 0; j <= e.cells; ++j) {
      int dof = e.node_dofs[j];
      if (dof < 0 || e.node_x(j) < 0.9 * e.length) continue;
      outer += (j == 0 || j == e.cells ? 0.5 : 1.0) * e.h * g.values[dof] * g.values[dof];
    }
  }
  if (outer > tol) {
    throw Error(ErrorCode::NoDecay, "mass " + std::to_string(outer) + " near the truncation boundary; enlarge L");
  }
}

}  // namespace

double coefficient_scale(double m, double p) { return std::pow(2.0 * m, 1.0 / (p - 2.0)); }
double scaled_mass(double m, double p) { return std::pow(2.0 * m, 2.0 / (p - 2.0)); }

double energy_Em(const ScalarField& u, double m, double p) {
  return 0.5 * derivative_norm2(u) - 2.0 * m / p * integral_pow(u, p, Region::Core);
}

double nonlinear_rayleigh(const ScalarField& g, double m, double p) {
  Problem pb(g.mesh, m, p);
  Eigen::VectorXd y = pb.basis->to_coords(g);
  return y.dot(pb.operator_part(y));
}

double nlse_residual(const ScalarField& g, double lambda, double m, double p) {
  Problem pb(g.mesh, m, p);
  Eigen::VectorXd y = pb.basis->to_coords(g);
  return (pb.operator_part(y) - lambda * y).norm();
}

double kirchhoff_residual(const NlseSolution& s) { return vertex_flux_sums(s.g).cwiseAbs().maxCoeff(); }

namespace {

NlseSolution solve_from(const Problem& pb, Eigen::VectorXd y, const NlseOptions& opts) {
  const int n = static_cast<int>(y.size());
  const double mass = opts.mass;
  const double m = pb.m;
  if (!(mass > 0.0)) throw Error(ErrorCode::PreconditionViolated, "mass must be positive");
  y *= std::sqrt(mass) / y.norm();

  NlseSolution sol;
  sol.m = m;
  sol.p = pb.p;

  auto rayleigh = [&](const Eigen::VectorXd& v) { return v.dot(pb.operator_part(v)) / v.squaredNorm(); };
  auto flow_residual = [&](const Eigen::VectorXd& v) {
    return (pb.operator_part(v) - rayleigh(v) * v).norm();
  };

  SparseMatrix eye(n, n);
  eye.setIdentity();
  double tau = 0.05;
  double energy = pb.energy(y);
  sol.flow_energies.push_back(energy);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  double factored_tau = -1.0;
  int step = 0;
  for (; step < opts.max_flow_steps; ++step) {
    if (tau < 1e-12) throw Error(ErrorCode::FlowStagnation, "gradient-flow step size collapsed");
    if (tau != factored_tau) {
      ldlt.compute(eye + tau * pb.k);
      factored_tau = tau;
    }
    Eigen::VectorXd next = ldlt.solve(y + 2.0 * m * tau * pb.psi.gradient(y));
    next *= std::sqrt(mass) / next.norm();
    double e_next = pb.energy(next);
    if (e_next > energy) {
      tau *= 0.5;
      continue;
    }
    double drop = energy - e_next;
    y = std::move(next);
    energy = e_next;
    sol.flow_energies.push_back(energy);
    if (drop < opts.flow_tol) break;
    if (step % 25 == 0 && flow_residual(y) < 1e-6) break;
    tau = std::min(tau * 1.5, 1e4);
  }
  sol.flow_steps = step;
  if (step == opts.max_flow_steps && flow_residual(y) > 1e-2) {
    throw Error(ErrorCode::FlowStagnation, "gradient flow did not approach a critical point");
  }

  double lambda = rayleigh(y);
  auto residual = [&](const Eigen::VectorXd& v, double lam, Eigen::VectorXd& f1, double& f2) {
    f1 = pb.operator_part(v) - lam * v;
    f2 = 0.5 * (mass - v.squaredNorm());
    return std::sqrt(f1.squaredNorm() + f2 * f2);
  };
  Eigen::VectorXd f1;
  double f2;
  double fnorm = residual(y, lambda, f1, f2);
  int it = 0;
  while (f1.norm() > opts.newton_tol || std::abs(f2) > 1e-13 * mass) {
    if (it >= opts.max_newton) throw Error(ErrorCode::NewtonDivergence, "NLSE Newton polish did not converge");
    ++it;
    SparseMatrix a = pb.k - lambda * eye - 2.0 * m * pb.psi.hessian(y);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(a.nonZeros() + 2 * n);
    for (int k = 0; k < a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator itr(a, k); itr; ++itr) t.emplace_back(itr.row(), itr.col(), itr.value());
    }
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, n, -y[i]);
      t.emplace_back(n, i, -y[i]);
    }
    SparseMatrix jac(n + 1, n + 1);
    jac.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(jac);
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::NewtonDivergence, "singular NLSE Jacobian");
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -f1;
    rhs[n] = -f2;
    Eigen::VectorXd d = lu.solve(rhs);
    double alpha = 1.0;
    for (;;) {
      Eigen::VectorXd yt = y + alpha * d.head(n);
      double lt = lambda + alpha * d[n];
      Eigen::VectorXd g1;
      double g2;
      double ft = residual(yt, lt, g1, g2);
      if (ft < (1.0 - 1e-4 * alpha) * fnorm || alpha < 1e-3) {
        y = std::move(yt);
        lambda = lt;
        f1 = std::move(g1);
        f2 = g2;
        fnorm = ft;
        break;
      }
      alpha *= 0.5;
    }
    if (alpha < 1e-3 && it > 5 && fnorm > 1e-6) {
      throw Error(ErrorCode::NewtonDivergence, "NLSE Newton line search stalled");
    }
  }
  y *= std::sqrt(mass) / y.norm();

  sol.newton_iters = it;
  sol.g = pb.basis->scalar_from_coords(y);
  sol.lambda = lambda;
  sol.mass = y.squaredNorm();
  sol.energy = energy_Em(sol.g, m, pb.p);
  sol.residual = (pb.operator_part(y) - lambda * y).norm();
  sol.kirchhoff = kirchhoff_residual(sol);
  check_decay(*pb.basis->mesh, sol.g, opts.decay_tol * mass);
  return sol;
}

}  // namespace

NlseSolution solve_nlse(std::shared_ptr<const Mesh> mesh, double m, double p, const NlseOptions& opts) {
  check_params(m, p);
  Problem pb(std::move(mesh), m, p);
  return solve_from(pb, sine_seed(pb, opts.seed_edge), opts);
}

NlseSolution solve_nlse(std::shared_ptr<const MetricGraph> graph, double m, double p, double h, double L,
                        const NlseOptions& opts) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(std::move(graph), h, L));
  return solve_nlse(mesh, m, p, opts);
}

std::vector<NlseSolution> solve_nlse_multistart(std::shared_ptr<const Mesh> mesh, double m, double p,
                                                const NlseOptions& opts) {
  check_params(m, p);
  Problem pb(mesh, m, p);
  std::vector<NlseSolution> out;
  const MetricGraph& graph = *mesh->graph;
  for (int e = 0; e < graph.edge_count(); ++e) {
    if (graph.edges()[e].kind != EdgeKind::Bounded) continue;
    out.push_back(solve_from(pb, sine_seed(pb, e), opts));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return out;
}

}  // namespace qgdirac
