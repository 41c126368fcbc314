#include "qgdirac/nonlinearity.hpp"

#include <cmath>

#include "qgdirac/errors.hpp"

namespace qgdirac {

CoreNonlinearity::CoreNonlinearity(std::shared_ptr<const ConstraintBasis> basis, double p, bool spinor) : p_(p) {
  if (!(p > 2.0)) throw Error(ErrorCode::DomainError, "nonlinearity exponent must exceed 2");
  const Mesh& mesh = *basis->mesh;
  const int nn = basis->node_dim();
  dim_ = spinor ? basis->dim() : nn;
  for (int m = 0; m < mesh.mid_count; ++m) {
    if (!mesh.mid_core[m]) continue;
    const auto& g = mesh.edges[mesh.mid_edge[m]];
    int j = mesh.mid_local[m];
    Cell c{};
    c.a = g.node_dofs[j];
    c.b = g.node_dofs[j + 1];
    c.wa = c.a >= 0 ? 0.5 / basis->node_sqrt_weight[c.a] : 0.0;
    c.wb = c.b >= 0 ? 0.5 / basis->node_sqrt_weight[c.b] : 0.0;
    c.mid = spinor ? nn + m : -1;
    c.wm = spinor ? 1.0 / basis->mid_sqrt_weight[m] : 0.0;
    c.h = mesh.mid_h[m];
    cells_.push_back(c);
  }
}

double CoreNonlinearity::modulus2(const Cell& c, const Eigen::VectorXd& z, double& u1, double& u2) const {
  u1 = 0.0;
  if (c.a >= 0) u1 += c.wa * z[c.a];
  if (c.b >= 0) u1 += c.wb * z[c.b];
  u2 = c.mid >= 0 ? c.wm * z[c.mid] : 0.0;
  return u1 * u1 + u2 * u2;
}

double CoreNonlinearity::value(const Eigen::VectorXd& z) const {
  if (z.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "nonlinearity argument has wrong length");
  double s = 0.0, u1, u2;
  for (const auto& c : cells_) s += c.h * std::pow(modulus2(c, z, u1, u2), 0.5 * p_);
  return s / p_;
}

Eigen::VectorXd CoreNonlinearity::gradient(const Eigen::VectorXd& z) const {
  if (z.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "nonlinearity argument has wrong length");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  double u1, u2;
  for (const auto& c : cells_) {
    double r2 = modulus2(c, z, u1, u2);
    if (r2 == 0.0) continue;
    double f = c.h * std::pow(r2, 0.5 * p_ - 1.0);
    if (c.a >= 0) g[c.a] += f * u1 * c.wa;
    if (c.b >= 0) g[c.b] += f * u1 * c.wb;
    if (c.mid >= 0) g[c.mid] += f * u2 * c.wm;
  }
  return g;
}

double CoreNonlinearity::value(const Eigen::VectorXcd& z) const {
  if (z.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "nonlinearity argument has wrong length");
  double s = 0.0;
  for (const auto& c : cells_) {
    cplx u1 = 0.0;
    if (c.a >= 0) u1 += c.wa * z[c.a];
    if (c.b >= 0) u1 += c.wb * z[c.b];
    cplx u2 = c.mid >= 0 ? c.wm * z[c.mid] : cplx(0.0);
    s += c.h * std::pow(std::norm(u1) + std::norm(u2), 0.5 * p_);
  }
  return s / p_;
}

Eigen::VectorXcd CoreNonlinearity::gradient(const Eigen::VectorXcd& z) const {
  if (z.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "nonlinearity argument has wrong length");
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim_);
  for (const auto& c : cells_) {
    cplx u1 = 0.0;
    if (c.a >= 0) u1 += c.wa * z[c.a];
    if (c.b >= 0) u1 += c.wb * z[c.b];
    cplx u2 = c.mid >= 0 ? c.wm * z[c.mid] : cplx(0.0);
    double r2 = std::norm(u1) + std::norm(u2);
    if (r2 == 0.0) continue;
    double f = c.h * std::pow(r2, 0.5 * p_ - 1.0);
    if (c.a >= 0) g[c.a] += f * u1 * c.wa;
    if (c.b >= 0) g[c.b] += f * u1 * c.wb;
    if (c.mid >= 0) g[c.mid] += f * u2 * c.wm;
  }
  return g;
}

SparseMatrix CoreNonlinearity::hessian(const Eigen::VectorXd& z) const {
  if (z.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "nonlinearity argument has wrong length");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(cells_.size() * 9);
  double u1, u2;
  for (const auto& c : cells_) {
    double r2 = modulus2(c, z, u1, u2);
    if (r2 == 0.0) continue;
    double f = c.h * std::pow(r2, 0.5 * p_ - 1.0);
    double g = c.h * (p_ - 2.0) * std::pow(r2, 0.5 * p_ - 2.0);
    int idx[3] = {c.a, c.b, c.mid};
    // ∂U/∂z_k as (component 1, component 2)
    double d1[3] = {c.wa, c.wb, 0.0};
    double d2[3] = {0.0, 0.0, c.wm};
    for (int i = 0; i < 3; ++i) {
      if (idx[i] < 0) continue;
      double pi = u1 * d1[i] + u2 * d2[i];
      for (int k = 0; k < 3; ++k) {
        if (idx[k] < 0) continue;
        double pk = u1 * d1[k] + u2 * d2[k];
        t.emplace_back(idx[i], idx[k], f * (d1[i] * d1[k] + d2[i] * d2[k]) + g * pi * pk);
      }
    }
  }
  SparseMatrix hm(dim_, dim_);
  hm.setFromTriplets(t.begin(), t.end());
  return hm;
}

Eigen::MatrixXd CoreNonlinearity::projected_hessian(const Eigen::VectorXd& z, const Eigen::MatrixXd& w) const {
  if (w.rows() != dim_) throw Error(ErrorCode::DimensionMismatch, "projection basis has wrong length");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(w.cols(), w.cols());
  Eigen::RowVectorXd du1(w.cols()), du2(w.cols());
  double u1, u2;
  for (const auto& c : cells_) {
    double r2 = modulus2(c, z, u1, u2);
    if (r2 == 0.0) continue;
    double f = c.h * std::pow(r2, 0.5 * p_ - 1.0);
    double g = c.h * (p_ - 2.0) * std::pow(r2, 0.5 * p_ - 2.0);
    du1.setZero();
    if (c.a >= 0) du1 += c.wa * w.row(c.a);
    if (c.b >= 0) du1 += c.wb * w.row(c.b);
    if (c.mid >= 0) du2 = c.wm * w.row(c.mid);
    else du2.setZero();
    Eigen::RowVectorXd dr = u1 * du1 + u2 * du2;
    out.noalias() += f * (du1.transpose() * du1 + du2.transpose() * du2) + g * dr.transpose() * dr;
  }
  return out;
}

}  // namespace qgdirac
