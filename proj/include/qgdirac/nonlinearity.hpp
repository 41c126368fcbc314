#pragma once

#include <memory>
#include <vector>

#include "qgdirac/operators.hpp"

namespace qgdirac {

/// Ψ(u) = (1/p) ∫_𝒦 |u|^p with the cell rule, as a function of orthonormal
/// coordinates. Scalar mode acts on node coordinates only; spinor mode acts on
/// real-ansatz coordinates z = (y¹, -i y²).
class CoreNonlinearity {
 public:
  CoreNonlinearity(std::shared_ptr<const ConstraintBasis> basis, double p, bool spinor);

  double exponent() const { return p_; }
  int dim() const { return dim_; }

  double value(const Eigen::VectorXd& z) const;
  /// ∇Ψ; its Euclidean norm squared is the discrete ∫_𝒦 |u|^{2p-2}.
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
  SparseMatrix hessian(const Eigen::VectorXd& z) const;
  /// Complex arguments (rotated frame); the gradient is taken with respect to
  /// real and imaginary parts and returned as one complex vector.
  double value(const Eigen::VectorXcd& z) const;
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z) const;
  /// Same as hessian() restricted to w: Wᵀ ∇²Ψ W without forming ∇²Ψ.
  Eigen::MatrixXd projected_hessian(const Eigen::VectorXd& z, const Eigen::MatrixXd& w) const;

 private:
  struct Cell {
    int a, b, mid;       // node coordinates (-1 if pinned) and midpoint coordinate (-1 in scalar mode)
    double wa, wb, wm;   // ∂U/∂z weights
    double h;
  };
  double modulus2(const Cell& c, const Eigen::VectorXd& z, double& u1, double& u2) const;

  double p_;
  int dim_;
  std::vector<Cell> cells_;
};

}  // namespace qgdirac
