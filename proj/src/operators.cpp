#include "qgdirac/operators.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "qgdirac/errors.hpp"

namespace qgdirac {

using Triplet = Eigen::Triplet<double>;

ConstraintBasis constraint_basis(std::shared_ptr<const Mesh> mesh) {
  ConstraintBasis b;
  b.mesh = mesh;
  const int nn = mesh->node_count;
  const int nm = mesh->mid_count;
  const int raw = mesh->raw_node_count;

  b.node_sqrt_weight.resize(nn);
  for (int i = 0; i < nn; ++i) {
    if (!(mesh->node_weight[i] > 0.0)) {
      throw Error(ErrorCode::RankDeficiency, "node DOF " + std::to_string(i) + " has no incident cell");
    }
    b.node_sqrt_weight[i] = std::sqrt(mesh->node_weight[i]);
  }
  b.mid_sqrt_weight.resize(nm);
  for (int m = 0; m < nm; ++m) b.mid_sqrt_weight[m] = std::sqrt(mesh->mid_h[m]);

  std::vector<Triplet> q, inc, grad;
  std::vector<int> hits(nn, 0);
  for (const auto& g : mesh->edges) {
    for (int j = 0; j <= g.cells; ++j) {
      int dof = g.node_dofs[j];
      if (dof < 0) continue;
      double w = (j == 0 || j == g.cells) ? 0.5 * g.h : g.h;
      q.emplace_back(g.raw_offset + j, dof, std::sqrt(w) / b.node_sqrt_weight[dof]);
      inc.emplace_back(g.raw_offset + j, dof, 1.0);
      ++hits[dof];
    }
    for (int j = 0; j < g.cells; ++j) {
      int m = g.first_mid + j;
      double s = b.mid_sqrt_weight[m] / g.h;
      int a = g.node_dofs[j], c = g.node_dofs[j + 1];
      if (c >= 0) grad.emplace_back(m, c, s / b.node_sqrt_weight[c]);
      if (a >= 0) grad.emplace_back(m, a, -s / b.node_sqrt_weight[a]);
    }
  }
  for (int i = 0; i < nn; ++i) {
    if (hits[i] == 0) throw Error(ErrorCode::RankDeficiency, "node DOF " + std::to_string(i) + " unused");
  }
  for (int m = 0; m < nm; ++m) q.emplace_back(raw + m, nn + m, 1.0);

  b.columns.resize(raw + nm, nn + nm);
  b.columns.setFromTriplets(q.begin(), q.end());
  b.node_incidence.resize(raw, nn);
  b.node_incidence.setFromTriplets(inc.begin(), inc.end());
  b.gradient.resize(nm, nn);
  b.gradient.setFromTriplets(grad.begin(), grad.end());
  return b;
}

namespace {

void check_mesh(const ConstraintBasis& b, const std::shared_ptr<const Mesh>& m) {
  if (m.get() != b.mesh.get() &&
      (!m || m->node_count != b.node_dim() || m->mid_count != b.mid_dim())) {
    throw Error(ErrorCode::DimensionMismatch, "field lives on a different mesh");
  }
}

void check_dim(Eigen::Index got, Eigen::Index want) {
  if (got != want) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector of length " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

}  // namespace

Eigen::VectorXcd ConstraintBasis::to_coords(const SpinorField& f) const {
  check_mesh(*this, f.mesh);
  Eigen::VectorXcd y(dim());
  y.head(node_dim()) = f.upper.cwiseProduct(node_sqrt_weight.cast<cplx>());
  y.tail(mid_dim()) = f.lower.cwiseProduct(mid_sqrt_weight.cast<cplx>());
  return y;
}

SpinorField ConstraintBasis::from_coords(const Eigen::VectorXcd& y) const {
  check_dim(y.size(), dim());
  SpinorField f = SpinorField::zeros(mesh);
  f.upper = y.head(node_dim()).cwiseQuotient(node_sqrt_weight.cast<cplx>());
  f.lower = y.tail(mid_dim()).cwiseQuotient(mid_sqrt_weight.cast<cplx>());
  return f;
}

Eigen::VectorXcd ConstraintBasis::to_rotated(const SpinorField& f) const {
  Eigen::VectorXcd z = to_coords(f);
  z.tail(mid_dim()) *= cplx(0.0, -1.0);
  return z;
}

SpinorField ConstraintBasis::from_rotated(const Eigen::VectorXcd& z) const {
  Eigen::VectorXcd y = z;
  y.tail(mid_dim()) *= cplx(0.0, 1.0);
  return from_coords(y);
}

Eigen::VectorXd ConstraintBasis::to_ansatz(const SpinorField& f) const { return to_rotated(f).real(); }

SpinorField ConstraintBasis::from_ansatz(const Eigen::VectorXd& z) const {
  return from_rotated(z.cast<cplx>());
}

Eigen::VectorXd ConstraintBasis::to_coords(const ScalarField& f) const {
  check_mesh(*this, f.mesh);
  return f.values.cwiseProduct(node_sqrt_weight);
}

ScalarField ConstraintBasis::scalar_from_coords(const Eigen::VectorXd& y) const {
  check_dim(y.size(), node_dim());
  return ScalarField{mesh, y.cwiseQuotient(node_sqrt_weight)};
}

DiracOperator::DiracOperator(std::shared_ptr<const ConstraintBasis> basis, double m, double c)
    : basis_(std::move(basis)), m_(m), c_(c) {
  if (!(m > 0.0) || !(c > 0.0)) throw Error(ErrorCode::PreconditionViolated, "Dirac operator needs m > 0 and c > 0");
  const int nn = basis_->node_dim();
  const int n = basis_->dim();
  const double mc2 = rest_energy();
  std::vector<Triplet> t;
  t.reserve(n + 4 * basis_->gradient.nonZeros());
  for (int i = 0; i < nn; ++i) t.emplace_back(i, i, mc2);
  for (int i = nn; i < n; ++i) t.emplace_back(i, i, -mc2);
  for (int k = 0; k < basis_->gradient.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(basis_->gradient, k); it; ++it) {
      int mid = static_cast<int>(it.row()), node = static_cast<int>(it.col());
      t.emplace_back(nn + mid, node, -c * it.value());
      t.emplace_back(node, nn + mid, -c * it.value());
    }
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(t.begin(), t.end());
}

Eigen::VectorXd DiracOperator::apply(const Eigen::VectorXd& z) const {
  check_dim(z.size(), dim());
  return matrix_ * z;
}

Eigen::VectorXcd DiracOperator::apply(const Eigen::VectorXcd& z) const {
  check_dim(z.size(), dim());
  Eigen::VectorXcd out(z.size());
  out.real() = matrix_ * z.real().eval();
  out.imag() = matrix_ * z.imag().eval();
  return out;
}

Eigen::VectorXd DiracOperator::apply_shifted(const Eigen::VectorXd& z, double omega) const {
  check_dim(z.size(), dim());
  const int nn = basis_->node_dim();
  const auto& b = basis_->gradient;
  const double mc2 = rest_energy();
  Eigen::VectorXd out(z.size());
  out.head(nn) = (mc2 - omega) * z.head(nn) - c_ * (b.transpose() * z.tail(basis_->mid_dim()));
  out.tail(basis_->mid_dim()) = -c_ * (b * z.head(nn)) - (mc2 + omega) * z.tail(basis_->mid_dim());
  return out;
}

DiracOperator assemble_dirac(std::shared_ptr<const ConstraintBasis> basis, double m, double c) {
  return DiracOperator(std::move(basis), m, c);
}

SchrodingerOperator::SchrodingerOperator(std::shared_ptr<const ConstraintBasis> basis) : basis_(std::move(basis)) {
  const Mesh& mesh = *basis_->mesh;
  std::vector<Triplet> t;
  for (const auto& g : mesh.edges) {
    for (int j = 0; j < g.cells; ++j) {
      int a = g.node_dofs[j], c = g.node_dofs[j + 1];
      double k = 1.0 / g.h;
      if (a >= 0) t.emplace_back(a, a, k);
      if (c >= 0) t.emplace_back(c, c, k);
      if (a >= 0 && c >= 0) {
        t.emplace_back(a, c, -k);
        t.emplace_back(c, a, -k);
      }
    }
  }
  stiffness_.resize(mesh.node_count, mesh.node_count);
  stiffness_.setFromTriplets(t.begin(), t.end());
  mass_ = Eigen::Map<const Eigen::VectorXd>(mesh.node_weight.data(), mesh.node_count);
  reduced_ = (basis_->gradient.transpose() * basis_->gradient).pruned();
}

SchrodingerOperator assemble_schrodinger(std::shared_ptr<const ConstraintBasis> basis) {
  return SchrodingerOperator(std::move(basis));
}

SpinorField apply(const DiracOperator& op, const SpinorField& f) {
  const auto& b = op.basis();
  return b.from_rotated(op.apply(b.to_rotated(f)));
}

ScalarField apply(const SchrodingerOperator& op, const ScalarField& f) {
  check_mesh(op.basis(), f.mesh);
  Eigen::VectorXd out = (op.stiffness() * f.values).cwiseQuotient(op.lumped_mass());
  return ScalarField{f.mesh, out};
}

Eigenpairs smallest_eigenpairs(const SparseMatrix& a, int k, double shift, double tol, int max_iter) {
  const int n = static_cast<int>(a.rows());
  if (k <= 0 || k > n) throw Error(ErrorCode::PreconditionViolated, "requested eigenpair count out of range");
  SparseMatrix shifted = a;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "factorisation of shifted matrix failed");

  const int block = std::min(n, k + std::max(4, k));
  Eigen::MatrixXd x(n, block);
  // Deterministic start: smooth, linearly independent columns.
  for (int j = 0; j < block; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = std::cos((j + 1) * 0.37 * i) + (j == 0 ? 1.0 : 0.0) + 1e-3 * ((i * 7 + j * 13) % 11);
  }
  Eigen::VectorXd previous = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::MatrixXd y = solver.solve(x);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    Eigen::MatrixXd small = q.transpose() * (a * q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (small + small.transpose()));
    x = q * es.eigenvectors();
    Eigen::VectorXd vals = es.eigenvalues().head(k);
    double change = ((vals - previous).cwiseAbs().array() / (vals.cwiseAbs().array() + 1.0)).maxCoeff();
    previous = vals;
    if (change < tol) {
      Eigenpairs out;
      out.values = vals;
      out.vectors = x.leftCols(k);
      return out;
    }
  }
  throw Error(ErrorCode::EigFailure, "shift-invert iteration did not converge");
}

}  // namespace qgdirac
