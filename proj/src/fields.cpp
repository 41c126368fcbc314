#include "qgdirac/fields.hpp"

#include <cmath>

#include "qgdirac/errors.hpp"

namespace qgdirac {

namespace {

void check_scalar(const ScalarField& f) {
  if (!f.mesh || f.values.size() != f.mesh->node_count) {
    throw Error(ErrorCode::DimensionMismatch, "scalar field does not match its mesh");
  }
}

void check_spinor(const SpinorField& f) {
  if (!f.mesh || f.upper.size() != f.mesh->node_count || f.lower.size() != f.mesh->mid_count) {
    throw Error(ErrorCode::DimensionMismatch, "spinor field does not match its mesh");
  }
}

bool in_region(const Mesh& mesh, int mid, Region region) { return region == Region::Graph || mesh.mid_core[mid]; }

const std::vector<double>& node_weights(const Mesh& mesh, Region region) {
  return region == Region::Graph ? mesh.node_weight : mesh.node_core_weight;
}

template <class Vec>
auto raw_node(const Mesh& mesh, const Vec& values, int ge, int j) -> typename Vec::Scalar {
  int dof = mesh.edges[ge].node_dofs[j];
  return dof < 0 ? typename Vec::Scalar(0) : values[dof];
}

// |U_c|^2 at each cell, node component averaged.
Eigen::VectorXd cell_modulus2(const ScalarField& f) {
  const Mesh& mesh = *f.mesh;
  Eigen::VectorXd out(mesh.mid_count);
  for (int m = 0; m < mesh.mid_count; ++m) {
    int ge = mesh.mid_edge[m], j = mesh.mid_local[m];
    double a = 0.5 * (raw_node(mesh, f.values, ge, j) + raw_node(mesh, f.values, ge, j + 1));
    out[m] = a * a;
  }
  return out;
}

Eigen::VectorXd cell_modulus2(const SpinorField& f) {
  const Mesh& mesh = *f.mesh;
  Eigen::VectorXd out(mesh.mid_count);
  for (int m = 0; m < mesh.mid_count; ++m) {
    int ge = mesh.mid_edge[m], j = mesh.mid_local[m];
    cplx a = 0.5 * (raw_node(mesh, f.upper, ge, j) + raw_node(mesh, f.upper, ge, j + 1));
    out[m] = std::norm(a) + std::norm(f.lower[m]);
  }
  return out;
}

double cell_integral_pow(const Mesh& mesh, const Eigen::VectorXd& mod2, double p, Region region) {
  double s = 0.0;
  for (int m = 0; m < mesh.mid_count; ++m) {
    if (in_region(mesh, m, region)) s += mesh.mid_h[m] * std::pow(mod2[m], 0.5 * p);
  }
  return s;
}

double cell_max(const Mesh& mesh, const Eigen::VectorXd& mod2, Region region) {
  double mx = 0.0;
  for (int m = 0; m < mesh.mid_count; ++m) {
    if (in_region(mesh, m, region)) mx = std::max(mx, mod2[m]);
  }
  return std::sqrt(mx);
}

double cell_support(const Mesh& mesh, const Eigen::VectorXd& mod2, double eps) {
  double s = 0.0;
  for (int m = 0; m < mesh.mid_count; ++m) {
    if (mod2[m] > eps * eps) s += mesh.mid_h[m];
  }
  return s;
}

}  // namespace

ScalarField ScalarField::zeros(std::shared_ptr<const Mesh> mesh) {
  ScalarField f{mesh, Eigen::VectorXd::Zero(mesh->node_count)};
  return f;
}

ScalarField ScalarField::sample(std::shared_ptr<const Mesh> mesh, const std::function<double(int, double)>& fn) {
  ScalarField f = zeros(mesh);
  std::vector<char> done(mesh->node_count, 0);
  for (const auto& g : mesh->edges) {
    for (int j = 0; j <= g.cells; ++j) {
      int dof = g.node_dofs[j];
      if (dof < 0 || done[dof]) continue;
      f.values[dof] = fn(g.edge, g.node_x(j));
      done[dof] = 1;
    }
  }
  return f;
}

double ScalarField::at(int ge, int j) const { return raw_node(*mesh, values, ge, j); }

SpinorField SpinorField::zeros(std::shared_ptr<const Mesh> mesh) {
  return {mesh, Eigen::VectorXcd::Zero(mesh->node_count), Eigen::VectorXcd::Zero(mesh->mid_count)};
}

SpinorField SpinorField::from_scalar(const ScalarField& s) {
  SpinorField f = zeros(s.mesh);
  f.upper = s.values.cast<cplx>();
  return f;
}

cplx SpinorField::upper_at(int ge, int j) const { return raw_node(*mesh, upper, ge, j); }

SpinorField& SpinorField::operator*=(cplx s) {
  upper *= s;
  lower *= s;
  return *this;
}

Eigen::VectorXd node_gradient(const Mesh& mesh, const Eigen::VectorXd& u) {
  Eigen::VectorXd out(mesh.mid_count);
  for (int m = 0; m < mesh.mid_count; ++m) {
    int ge = mesh.mid_edge[m], j = mesh.mid_local[m];
    out[m] = (raw_node(mesh, u, ge, j + 1) - raw_node(mesh, u, ge, j)) / mesh.mid_h[m];
  }
  return out;
}

Eigen::VectorXcd node_gradient(const Mesh& mesh, const Eigen::VectorXcd& u) {
  Eigen::VectorXcd out(mesh.mid_count);
  for (int m = 0; m < mesh.mid_count; ++m) {
    int ge = mesh.mid_edge[m], j = mesh.mid_local[m];
    out[m] = (raw_node(mesh, u, ge, j + 1) - raw_node(mesh, u, ge, j)) / mesh.mid_h[m];
  }
  return out;
}

Eigen::VectorXcd midpoint_divergence(const Mesh& mesh, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(mesh.node_count);
  for (const auto& g : mesh.edges) {
    for (int j = 0; j <= g.cells; ++j) {
      int dof = g.node_dofs[j];
      if (dof < 0) continue;
      cplx left = j > 0 ? v[g.first_mid + j - 1] : cplx(0);
      cplx right = j < g.cells ? v[g.first_mid + j] : cplx(0);
      acc[dof] += left - right;
    }
  }
  for (int i = 0; i < mesh.node_count; ++i) acc[i] /= mesh.node_weight[i];
  return acc;
}

double integral_pow(const ScalarField& f, double p, Region region) {
  check_scalar(f);
  return cell_integral_pow(*f.mesh, cell_modulus2(f), p, region);
}

double integral_pow(const SpinorField& f, double p, Region region) {
  check_spinor(f);
  return cell_integral_pow(*f.mesh, cell_modulus2(f), p, region);
}

double derivative_norm2(const ScalarField& f, Region region) {
  check_scalar(f);
  const Mesh& mesh = *f.mesh;
  Eigen::VectorXd d = node_gradient(mesh, f.values);
  double s = 0.0;
  for (int m = 0; m < mesh.mid_count; ++m) {
    if (in_region(mesh, m, region)) s += mesh.mid_h[m] * d[m] * d[m];
  }
  return s;
}

double derivative_norm2(const SpinorField& f, Region region) {
  check_spinor(f);
  const Mesh& mesh = *f.mesh;
  Eigen::VectorXcd d1 = node_gradient(mesh, f.upper);
  Eigen::VectorXcd d2 = midpoint_divergence(mesh, f.lower);
  const auto& w = node_weights(mesh, region);
  double s = 0.0;
  for (int m = 0; m < mesh.mid_count; ++m) {
    if (in_region(mesh, m, region)) s += mesh.mid_h[m] * std::norm(d1[m]);
  }
  for (int i = 0; i < mesh.node_count; ++i) s += w[i] * std::norm(d2[i]);
  return s;
}

double norm(const ScalarField& f, NormKind kind, Region region, double p) {
  check_scalar(f);
  const Mesh& mesh = *f.mesh;
  const auto& w = node_weights(mesh, region);
  auto l2sq = [&] {
    double s = 0.0;
    for (int i = 0; i < mesh.node_count; ++i) s += w[i] * f.values[i] * f.values[i];
    return s;
  };
  switch (kind) {
    case NormKind::L2: return std::sqrt(l2sq());
    case NormKind::Lp:
      if (p < 1.0) throw Error(ErrorCode::DomainError, "Lp norm needs p >= 1");
      return std::pow(integral_pow(f, p, region), 1.0 / p);
    case NormKind::Linf: {
      double mx = 0.0;
      for (int i = 0; i < mesh.node_count; ++i) {
        if (w[i] > 0.0) mx = std::max(mx, std::abs(f.values[i]));
      }
      return mx;
    }
    case NormKind::H1: return std::sqrt(l2sq() + derivative_norm2(f, region));
  }
  return 0.0;
}

double norm(const SpinorField& f, NormKind kind, Region region, double p) {
  check_spinor(f);
  const Mesh& mesh = *f.mesh;
  const auto& w = node_weights(mesh, region);
  auto l2sq = [&] {
    double s = 0.0;
    for (int i = 0; i < mesh.node_count; ++i) s += w[i] * std::norm(f.upper[i]);
    for (int m = 0; m < mesh.mid_count; ++m) {
      if (in_region(mesh, m, region)) s += mesh.mid_h[m] * std::norm(f.lower[m]);
    }
    return s;
  };
  switch (kind) {
    case NormKind::L2: return std::sqrt(l2sq());
    case NormKind::Lp:
      if (p < 1.0) throw Error(ErrorCode::DomainError, "Lp norm needs p >= 1");
      return std::pow(integral_pow(f, p, region), 1.0 / p);
    case NormKind::Linf: return cell_max(mesh, cell_modulus2(f), region);
    case NormKind::H1: return std::sqrt(l2sq() + derivative_norm2(f, region));
  }
  return 0.0;
}

double support_measure(const ScalarField& f, double eps) {
  check_scalar(f);
  return cell_support(*f.mesh, cell_modulus2(f), eps);
}

double support_measure(const SpinorField& f, double eps) {
  check_spinor(f);
  return cell_support(*f.mesh, cell_modulus2(f), eps);
}

Eigen::VectorXcd vertex_lower_trace_sums(const SpinorField& f) {
  check_spinor(f);
  const Mesh& mesh = *f.mesh;
  const MetricGraph& graph = *mesh.graph;
  Eigen::VectorXcd sums = Eigen::VectorXcd::Zero(graph.vertex_count());
  for (const auto& g : mesh.edges) {
    const Edge& e = graph.edges()[g.edge];
    const cplx* v = f.lower.data() + g.first_mid;
    sums[e.start] += 0.5 * (3.0 * v[0] - v[1]);
    if (e.end >= 0) sums[e.end] -= 0.5 * (3.0 * v[g.cells - 1] - v[g.cells - 2]);
  }
  return sums;
}

Eigen::VectorXd vertex_flux_sums(const ScalarField& f) {
  check_scalar(f);
  const Mesh& mesh = *f.mesh;
  const MetricGraph& graph = *mesh.graph;
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(graph.vertex_count());
  for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
    const auto& g = mesh.edges[ge];
    const Edge& e = graph.edges()[g.edge];
    auto outgoing = [&](int j0, int dir) {
      return (-3.0 * f.at(ge, j0) + 4.0 * f.at(ge, j0 + dir) - f.at(ge, j0 + 2 * dir)) / (2.0 * g.h);
    };
    sums[e.start] += outgoing(0, +1);
    if (e.end >= 0) sums[e.end] += outgoing(g.cells, -1);
  }
  for (int v = 0; v < graph.vertex_count(); ++v) {
    if (mesh.vertex_dof[v] < 0) sums[v] = 0.0;
  }
  return sums;
}

}  // namespace qgdirac
