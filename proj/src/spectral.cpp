#include "qgdirac/spectral.hpp"

#include <cmath>
#include <cstdio>

#include "qgdirac/errors.hpp"

namespace qgdirac {

SpectralDecomposition::SpectralDecomposition(const DiracOperator& op, Eigen::VectorXd values, Eigen::MatrixXd vectors)
    : basis_(op.basis_ptr()), m_(op.mass()), c_(op.speed()), values_(std::move(values)), vectors_(std::move(vectors)) {
  while (negative_ < values_.size() && values_[negative_] < 0.0) ++negative_;
}

double SpectralDecomposition::min_abs_eigenvalue() const { return values_.cwiseAbs().minCoeff(); }

Eigen::VectorXcd SpectralDecomposition::coefficients(const Eigen::VectorXcd& z) const {
  if (z.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "vector does not match the decomposition");
  Eigen::VectorXcd out(dim());
  out.real() = vectors_.transpose() * z.real().eval();
  out.imag() = vectors_.transpose() * z.imag().eval();
  return out;
}

SpectralDecomposition eigendecompose(const DiracOperator& op) {
  const int n = op.dim();
  if (n > kDenseEigenLimit) {
    throw Error(ErrorCode::EigFailure, "dimension " + std::to_string(n) + " exceeds the dense eigensolver limit");
  }
  if (n > 3000) std::fprintf(stderr, "qgdirac: dense eigensolve of dimension %d\n", n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "dense eigensolver did not converge");
  const double mc2 = op.rest_energy();
  if (es.eigenvalues().cwiseAbs().minCoeff() < mc2 * (1.0 - 1e-8)) {
    throw Error(ErrorCode::EigFailure, "eigenvalue inside the spectral gap");
  }
  return SpectralDecomposition(op, es.eigenvalues(), es.eigenvectors());
}

Eigen::VectorXd project(const SpectralDecomposition& dec, const Eigen::VectorXd& z, SpectralSign sign) {
  if (z.size() != dec.dim()) throw Error(ErrorCode::DimensionMismatch, "vector does not match the decomposition");
  if (sign == SpectralSign::Negative) {
    auto v = dec.negative_vectors();
    return v * (v.transpose() * z);
  }
  auto v = dec.positive_vectors();
  return v * (v.transpose() * z);
}

Eigen::VectorXcd project(const SpectralDecomposition& dec, const Eigen::VectorXcd& z, SpectralSign sign) {
  Eigen::VectorXcd out(z.size());
  out.real() = project(dec, Eigen::VectorXd(z.real()), sign);
  out.imag() = project(dec, Eigen::VectorXd(z.imag()), sign);
  return out;
}

SpinorField project(const SpectralDecomposition& dec, const SpinorField& f, SpectralSign sign) {
  const auto& b = dec.basis();
  return b.from_rotated(project(dec, b.to_rotated(f), sign));
}

double c_norm(const SpectralDecomposition& dec, const Eigen::VectorXd& z) {
  Eigen::VectorXd a = dec.coefficients(z);
  return std::sqrt((dec.eigenvalues().cwiseAbs().array() * a.array().square()).sum());
}

double c_norm(const SpectralDecomposition& dec, const Eigen::VectorXcd& z) {
  Eigen::VectorXcd a = dec.coefficients(z);
  return std::sqrt((dec.eigenvalues().cwiseAbs().array() * a.array().abs2()).sum());
}

double c_norm(const SpectralDecomposition& dec, const SpinorField& f) {
  return c_norm(dec, dec.basis().to_rotated(f));
}

double c_inner(const SpectralDecomposition& dec, const Eigen::VectorXcd& u, const Eigen::VectorXcd& w) {
  Eigen::VectorXcd a = dec.coefficients(u), b = dec.coefficients(w);
  return (dec.eigenvalues().cwiseAbs().array().cast<cplx>() * a.conjugate().array() * b.array()).sum().real();
}

}  // namespace qgdirac
