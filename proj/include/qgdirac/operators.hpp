#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qgdirac/fields.hpp"
#include "qgdirac/mesh.hpp"

namespace qgdirac {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Orthonormal basis of the constrained DOF space.
///
/// The raw space holds one value per (edge, local node) and per midpoint,
/// scaled by the square root of its quadrature weight so that the discrete
/// L² product becomes the Euclidean one. Columns enforce continuity of u¹ at
/// every vertex and the pinned values at truncated ends. Reduced coordinates
/// are y = (√M_i u¹_i, √h_m u²_m), so ‖y‖ equals the discrete L² norm.
///
/// The signed-sum vertex condition on u² is not imposed on the columns: it
/// is the natural condition of the adjoint difference and shows up as an
/// O(h²) extrapolated trace sum (see vertex_lower_trace_sums).
struct ConstraintBasis {
  std::shared_ptr<const Mesh> mesh;
  SparseMatrix columns;        ///< Q, (raw nodes + mids) × (nodes + mids)
  SparseMatrix node_incidence;  ///< raw node -> node DOF, 0/1 entries
  Eigen::VectorXd node_sqrt_weight;
  Eigen::VectorXd mid_sqrt_weight;
  /// Staggered derivative nodes -> midpoints in reduced coordinates.
  SparseMatrix gradient;

  int node_dim() const { return static_cast<int>(node_sqrt_weight.size()); }
  int mid_dim() const { return static_cast<int>(mid_sqrt_weight.size()); }
  int dim() const { return node_dim() + mid_dim(); }

  Eigen::VectorXcd to_coords(const SpinorField& f) const;
  SpinorField from_coords(const Eigen::VectorXcd& y) const;

  /// Real-ansatz coordinates z = (y¹, -i y²) for fields with u¹ real and u²
  /// purely imaginary. Imaginary parts of u¹ and real parts of u² are dropped.
  Eigen::VectorXd to_ansatz(const SpinorField& f) const;
  SpinorField from_ansatz(const Eigen::VectorXd& z) const;
  /// Complex spinor -> complex z in the same rotated frame.
  Eigen::VectorXcd to_rotated(const SpinorField& f) const;
  SpinorField from_rotated(const Eigen::VectorXcd& z) const;

  Eigen::VectorXd to_coords(const ScalarField& f) const;
  ScalarField scalar_from_coords(const Eigen::VectorXd& y) const;
};

ConstraintBasis constraint_basis(std::shared_ptr<const Mesh> mesh);

/// Discrete Dirac operator -i c σ₁ d/dx + m c² σ₃ with Kirchhoff-type vertex
/// conditions. Stored in the real-ansatz frame, where it is the real
/// symmetric matrix [[mc² I, -c Bᵀ], [-c B, -mc² I]]; the complex operator is
/// diag(I, iI) · that · diag(I, -iI).
class DiracOperator {
 public:
  DiracOperator(std::shared_ptr<const ConstraintBasis> basis, double m, double c);

  double mass() const { return m_; }
  double speed() const { return c_; }
  double rest_energy() const { return m_ * c_ * c_; }
  int dim() const { return basis_->dim(); }
  const ConstraintBasis& basis() const { return *basis_; }
  std::shared_ptr<const ConstraintBasis> basis_ptr() const { return basis_; }
  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

  Eigen::VectorXd apply(const Eigen::VectorXd& z) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const;
  /// (D - ω) z with the diagonal formed as (±mc² - ω) before multiplying.
  Eigen::VectorXd apply_shifted(const Eigen::VectorXd& z, double omega) const;

 private:
  std::shared_ptr<const ConstraintBasis> basis_;
  double m_;
  double c_;
  SparseMatrix matrix_;
};

DiracOperator assemble_dirac(std::shared_ptr<const ConstraintBasis> basis, double m, double c);

/// Kirchhoff Laplacian (weak -d²/dx²) with continuity at vertices, natural
/// flux condition, and Dirichlet at truncated ends and Dirichlet vertices.
class SchrodingerOperator {
 public:
  explicit SchrodingerOperator(std::shared_ptr<const ConstraintBasis> basis);

  const ConstraintBasis& basis() const { return *basis_; }
  std::shared_ptr<const ConstraintBasis> basis_ptr() const { return basis_; }
  /// Stiffness in node values: Σ_cells h ((u_{j+1}-u_j)/h)².
  const SparseMatrix& stiffness() const { return stiffness_; }
  /// Lumped (trapezoid) mass, diagonal.
  const Eigen::VectorXd& lumped_mass() const { return mass_; }
  /// M^{-1/2} S M^{-1/2} = BᵀB, acting on reduced coordinates.
  const SparseMatrix& matrix() const { return reduced_; }
  int dim() const { return static_cast<int>(mass_.size()); }

 private:
  std::shared_ptr<const ConstraintBasis> basis_;
  SparseMatrix stiffness_;
  Eigen::VectorXd mass_;
  SparseMatrix reduced_;
};

SchrodingerOperator assemble_schrodinger(std::shared_ptr<const ConstraintBasis> basis);

SpinorField apply(const DiracOperator& op, const SpinorField& f);
/// Strong form -g″ (M⁻¹ S g) in node values.
ScalarField apply(const SchrodingerOperator& op, const ScalarField& f);

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Lowest k eigenpairs of a sparse symmetric positive semidefinite matrix by
/// shift-invert block iteration with Rayleigh-Ritz. Throws EigFailure if the
/// Ritz values have not settled to `tol` (relative) after `max_iter` sweeps.
Eigenpairs smallest_eigenpairs(const SparseMatrix& a, int k, double shift = -1.0, double tol = 1e-13,
                               int max_iter = 500);

}  // namespace qgdirac
