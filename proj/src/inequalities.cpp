#include "qgdirac/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>

#include "qgdirac/errors.hpp"

namespace qgdirac {

namespace {

double bump(double d, double w) {
  if (std::abs(d) >= w) return 0.0;
  double s = std::cos(0.5 * std::numbers::pi * d / w);
  return s * s;
}

cplx gaussian_c(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  double re = n(rng);
  return {re, n(rng)};
}

void add_edge_bump(SpinorField& f, const EdgeGrid& g, double x0, double w, cplx a1, cplx a2) {
  for (int j = 0; j <= g.cells; ++j) {
    int dof = g.node_dofs[j];
    if (dof >= 0) f.upper[dof] += a1 * bump(g.node_x(j) - x0, w);
  }
  for (int j = 0; j < g.cells; ++j) f.lower[g.first_mid + j] += a2 * bump(g.mid_x(j) - x0, w);
}

SpinorField random_bump(std::shared_ptr<const Mesh> mesh, std::mt19937_64& rng) {
  SpinorField f = SpinorField::zeros(mesh);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(mesh->edges.size()) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int n = count(rng);
  for (int b = 0; b < n; ++b) {
    const auto& g = mesh->edges[pick(rng)];
    double span = g.half_line ? std::min(g.length, 4.0) : g.length;
    double x0 = span * unit(rng);
    double w = 0.1 + 0.5 * unit(rng);
    cplx a1 = gaussian_c(rng);
    cplx a2 = unit(rng) * gaussian_c(rng);
    add_edge_bump(f, g, x0, w, a1, a2);
  }
  return f;
}

SpinorField random_spike(std::shared_ptr<const Mesh> mesh, std::mt19937_64& rng) {
  SpinorField f = SpinorField::zeros(mesh);
  const MetricGraph& graph = *mesh->graph;
  std::vector<int> free_vertices;
  for (int v = 0; v < graph.vertex_count(); ++v) {
    if (mesh->vertex_dof[v] >= 0) free_vertices.push_back(v);
  }
  std::uniform_int_distribution<int> pick(0, static_cast<int>(free_vertices.size()) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int v = free_vertices[pick(rng)];
  double w = 0.1 + 0.2 * unit(rng);
  cplx a1 = gaussian_c(rng);
  for (const auto& g : mesh->edges) {
    const Edge& e = graph.edges()[g.edge];
    cplx a2 = unit(rng) * gaussian_c(rng);
    if (e.start == v) add_edge_bump(f, g, 0.0, w, 0.0, a2);
    if (e.end == v) add_edge_bump(f, g, g.length, w, 0.0, -a2);
  }
  // u¹ lives on shared DOFs: add the profile once per node DOF.
  std::vector<char> seen(mesh->node_count, 0);
  for (const auto& g : mesh->edges) {
    const Edge& e = graph.edges()[g.edge];
    for (int j = 0; j <= g.cells; ++j) {
      int dof = g.node_dofs[j];
      if (dof < 0 || seen[dof]) continue;
      double d = std::numeric_limits<double>::infinity();
      if (e.start == v) d = std::min(d, g.node_x(j));
      if (e.end == v) d = std::min(d, g.length - g.node_x(j));
      if (std::isfinite(d) && d < w) {
        f.upper[dof] += a1 * bump(d, w);
        seen[dof] = 1;
      }
    }
  }
  return f;
}

std::vector<int> modes_by_magnitude(const SpectralDecomposition& dec) {
  std::vector<int> idx(dec.dim());
  std::iota(idx.begin(), idx.end(), 0);
  const auto& nu = dec.eigenvalues();
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(nu[a]) < std::abs(nu[b]); });
  return idx;
}

double l2sq(const SpinorField& u) { return std::pow(norm(u, NormKind::L2), 2); }

void record(InequalityReport& r, int sample, double ratio, bool violated, bool larger_is_worse = true) {
  if (r.samples == 0 || (larger_is_worse ? ratio > r.max_ratio : ratio < r.max_ratio)) {
    r.max_ratio = ratio;
    r.worst_sample = sample;
  }
  if (violated) ++r.violations;
  ++r.samples;
}

// Local ascent of a scale-invariant ratio inside span(w), coefficient space.
double ascend(const std::function<double(const Eigen::VectorXd&)>& ratio, Eigen::VectorXd a, int iters) {
  a.normalize();
  double f = std::log(ratio(a));
  double step = 0.2;
  const int k = static_cast<int>(a.size());
  for (int it = 0; it < iters && step > 1e-10; ++it) {
    Eigen::VectorXd grad(k);
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd ap = a, am = a;
      ap[i] += 1e-6;
      am[i] -= 1e-6;
      grad[i] = (std::log(ratio(ap)) - std::log(ratio(am))) / 2e-6;
    }
    grad -= grad.dot(a) * a;  // tangent to the unit sphere
    if (grad.norm() < 1e-12) break;
    Eigen::VectorXd dir = grad.normalized();
    for (;;) {
      Eigen::VectorXd trial = (a + step * dir).normalized();
      double ft = std::log(ratio(trial));
      if (ft > f) {
        a = trial;
        f = ft;
        step *= 1.5;
        break;
      }
      step *= 0.5;
      if (step < 1e-10) break;
    }
  }
  return std::exp(f);
}

}  // namespace

std::vector<SpinorField> random_bump_fields(std::shared_ptr<const Mesh> mesh, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SpinorField> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(i % 3 == 2 ? random_spike(mesh, rng) : random_bump(mesh, rng));
  return out;
}

std::vector<SpinorField> random_fields(const SpectralDecomposition& dec, int count, std::uint64_t seed, int modes) {
  auto mesh = dec.basis().mesh;
  std::mt19937_64 rng(seed);
  const auto order = modes_by_magnitude(dec);
  modes = std::min(modes, dec.dim());
  std::vector<SpinorField> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    int kind = i % 5;
    if (kind < 2) {
      Eigen::VectorXcd z = Eigen::VectorXcd::Zero(dec.dim());
      for (int k = 0; k < modes; ++k) z += gaussian_c(rng) / (1.0 + k) * dec.eigenvectors().col(order[k]).cast<cplx>();
      out.push_back(dec.basis().from_rotated(z));
    } else if (kind < 4) {
      out.push_back(random_bump(mesh, rng));
    } else {
      out.push_back(random_spike(mesh, rng));
    }
  }
  return out;
}

InequalityReport check_support_inequality(const std::vector<SpinorField>& samples, double p) {
  if (!(p > 2.0)) throw Error(ErrorCode::DomainError, "support inequality needs p > 2");
  InequalityReport r;
  r.id = "support";
  r.max_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const auto& u = samples[i];
    double lhs = integral_pow(u, p);
    double mass = integral_pow(u, 2.0);
    double supp = support_measure(u);
    if (supp == 0.0) continue;
    double rhs = std::pow(supp, 1.0 - 0.5 * p) * std::pow(mass, 0.5 * p);
    record(r, i, lhs / rhs, lhs < rhs * (1.0 - 1e-10), false);
  }
  return r;
}

GnConstants estimate_gn_constants(const SpectralDecomposition& dec, double p, const std::vector<SpinorField>& samples,
                                  int ascent_modes, int ascent_iters) {
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorCode::DomainError, "p must lie in (2, 6)");
  const auto& basis = dec.basis();
  const Mesh& mesh = *basis.mesh;
  const double c = dec.speed(), mc2 = dec.rest_energy();

  double ell_min = std::numeric_limits<double>::infinity();
  for (const auto& g : mesh.edges) ell_min = std::min(ell_min, g.length);
  const double nu_max = dec.eigenvalues().cwiseAbs().maxCoeff();
  const double sup_cert = std::sqrt(2.0 + 1.0 / ell_min);
  const double sob_cert = std::pow(sup_cert, p - 2.0);
  const double form_cert = sob_cert * std::pow((1.0 / mc2 + nu_max / (c * c)) / mc2, 0.25 * (p - 2.0));

  auto form_ratio = [&](const SpinorField& u) {
    return integral_pow(u, p, Region::Core) / (std::pow(c_norm(dec, u), p - 2.0) * l2sq(u));
  };
  auto sob_ratio = [&](const SpinorField& u) {
    double l2 = norm(u, NormKind::L2), h1 = norm(u, NormKind::H1);
    return integral_pow(u, p, Region::Core) / (std::pow(h1, 0.5 * p - 1.0) * std::pow(l2, 0.5 * p + 1.0));
  };
  auto sup_ratio = [&](const SpinorField& u) {
    return norm(u, NormKind::Linf, Region::Core) / std::sqrt(norm(u, NormKind::H1) * norm(u, NormKind::L2));
  };

  GnConstants out;
  out.form.id = "gn_form";
  out.sobolev.id = "gn_sobolev";
  out.sup.id = "gn_sup";
  out.monotone.id = "core_monotone";
  out.form.certified_bound = form_cert;
  out.sobolev.certified_bound = sob_cert;
  out.sup.certified_bound = sup_cert;
  const double tol = 1.0 + 1e-10;

  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const auto& u = samples[i];
    if (l2sq(u) == 0.0) continue;
    double fr = form_ratio(u), sr = sob_ratio(u), ur = sup_ratio(u);
    record(out.form, i, fr, fr > form_cert * tol);
    record(out.sobolev, i, sr, sr > sob_cert * tol);
    record(out.sup, i, ur, ur > sup_cert * tol);
    double core = integral_pow(u, p, Region::Core), all = integral_pow(u, p);
    record(out.monotone, i, all > 0.0 ? core / all : 0.0, core > all * (1.0 + 1e-12));
  }

  const auto order = modes_by_magnitude(dec);
  const int k = std::min(ascent_modes, dec.dim());
  Eigen::MatrixXd w(dec.dim(), k);
  for (int i = 0; i < k; ++i) w.col(i) = dec.eigenvectors().col(order[i]);
  auto lift = [&](const Eigen::VectorXd& a) { return basis.from_ansatz(w * a); };
  std::vector<Eigen::VectorXd> starts;
  for (int s = 0; s < std::min(k, 3); ++s) starts.push_back(Eigen::VectorXd::Unit(k, s));
  Eigen::VectorXd decay(k);
  for (int i = 0; i < k; ++i) decay[i] = 1.0 / (1.0 + i);
  starts.push_back(decay);

  struct Family {
    InequalityReport* report;
    std::function<double(const SpinorField&)> ratio;
  };
  Family families[] = {{&out.form, form_ratio}, {&out.sobolev, sob_ratio}, {&out.sup, sup_ratio}};
  for (auto& fam : families) {
    for (const auto& a0 : starts) {
      double best = ascend([&](const Eigen::VectorXd& a) { return fam.ratio(lift(a)); }, a0, ascent_iters);
      record(*fam.report, -1, best, best > fam.report->certified_bound * tol);
    }
  }
  return out;
}

ProjectorReport check_projector_bound(const SpectralDecomposition& dec, double p, double s_p,
                                      const std::vector<SpinorField>& samples) {
  const double m = dec.mass(), c = dec.speed();
  if (m * c < 1.0) throw Error(ErrorCode::PreconditionViolated, "projector bound needs c >= 1/m");
  ProjectorReport out;
  out.bound.id = "projector_bound";
  out.intermediate.id = "projector_h1";
  const double mc = m * c;
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const auto& u = samples[i];
    const double h1 = norm(u, NormKind::H1);
    if (h1 == 0.0) continue;
    for (SpectralSign sign : {SpectralSign::Positive, SpectralSign::Negative}) {
      SpinorField part = project(dec, u, sign);
      double l2 = norm(part, NormKind::L2);
      double h1_part = norm(part, NormKind::H1);
      double lhs = integral_pow(part, p, Region::Core);
      double rhs = s_p * std::pow(mc, 0.5 * p - 1.0) * std::pow(h1, 0.5 * p - 1.0) * std::pow(l2, 0.5 * p + 1.0);
      double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
      record(out.bound, i, ratio, lhs > rhs * (1.0 + 1e-10));
      double step = h1_part * h1_part / (mc * mc * h1 * h1);
      record(out.intermediate, i, step, step > 1.0 + 1e-8);
    }
  }
  return out;
}

}  // namespace qgdirac
