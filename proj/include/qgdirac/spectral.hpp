#pragma once

#include <Eigen/Dense>

#include "qgdirac/operators.hpp"

namespace qgdirac {

enum class SpectralSign { Positive, Negative };

/// Full eigendecomposition of a reduced Dirac matrix in the real-ansatz
/// frame. Eigenvalues ascend; the first `negative_count()` are < 0.
class SpectralDecomposition {
 public:
  SpectralDecomposition(const DiracOperator& op, Eigen::VectorXd values, Eigen::MatrixXd vectors);

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
  int dim() const { return static_cast<int>(values_.size()); }
  int negative_count() const { return negative_; }
  int positive_count() const { return dim() - negative_; }
  double mass() const { return m_; }
  double speed() const { return c_; }
  double rest_energy() const { return m_ * c_ * c_; }
  double min_abs_eigenvalue() const;
  const ConstraintBasis& basis() const { return *basis_; }
  std::shared_ptr<const ConstraintBasis> basis_ptr() const { return basis_; }

  auto negative_vectors() const { return vectors_.leftCols(negative_); }
  auto positive_vectors() const { return vectors_.rightCols(positive_count()); }
  auto negative_values() const { return values_.head(negative_); }
  auto positive_values() const { return values_.tail(positive_count()); }

  /// Coefficients ⟨v_i, z⟩ (squared moduli give the spectral measure).
  Eigen::VectorXd coefficients(const Eigen::VectorXd& z) const { return vectors_.transpose() * z; }
  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& z) const;

 private:
  std::shared_ptr<const ConstraintBasis> basis_;
  double m_;
  double c_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
  int negative_ = 0;
};

/// Dimension above which eigendecompose() refuses the dense path.
inline constexpr int kDenseEigenLimit = 6000;

/// Dense symmetric eigensolve. Throws EigFailure on non-convergence or when
/// an eigenvalue falls inside the discrete gap (-mc²(1-1e-8), mc²(1-1e-8)).
SpectralDecomposition eigendecompose(const DiracOperator& op);

/// P± in the real-ansatz frame (coefficient truncation).
Eigen::VectorXd project(const SpectralDecomposition& dec, const Eigen::VectorXd& z, SpectralSign sign);
Eigen::VectorXcd project(const SpectralDecomposition& dec, const Eigen::VectorXcd& z, SpectralSign sign);
SpinorField project(const SpectralDecomposition& dec, const SpinorField& f, SpectralSign sign);

/// ‖u‖_c = (Σ_i |ν_i| |⟨v_i,u⟩|²)^{1/2}.
double c_norm(const SpectralDecomposition& dec, const Eigen::VectorXd& z);
double c_norm(const SpectralDecomposition& dec, const Eigen::VectorXcd& z);
double c_norm(const SpectralDecomposition& dec, const SpinorField& f);
/// (u, w)_c = Re Σ_i |ν_i| conj⟨v_i,u⟩ ⟨v_i,w⟩.
double c_inner(const SpectralDecomposition& dec, const Eigen::VectorXcd& u, const Eigen::VectorXcd& w);

}  // namespace qgdirac
