#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <doctest.h>

#include "qgdirac/errors.hpp"
#include "qgdirac/nlde.hpp"
#include "qgdirac/spectral.hpp"

using namespace qgdirac;
using std::numbers::pi;

namespace {

std::shared_ptr<const ConstraintBasis> basis_of(const GraphSpec& spec, double h, double L = 3.0) {
  auto g = std::make_shared<const MetricGraph>(build_graph(spec));
  auto mesh = std::make_shared<const Mesh>(build_mesh(g, h, L));
  return std::make_shared<const ConstraintBasis>(constraint_basis(mesh));
}

}  // namespace

TEST_CASE("decomposition reconstructs the matrix") {
  auto b = basis_of(graphs::star({1.0, 0.6, 0.8}, 1), 0.05);
  DiracOperator op(b, 1.0, 4.0);
  auto dec = eigendecompose(op);
  CHECK(dec.dim() == b->dim());
  CHECK(dec.negative_count() + dec.positive_count() == dec.dim());
  Eigen::MatrixXd a = op.dense();
  Eigen::MatrixXd rec = dec.eigenvectors() * dec.eigenvalues().asDiagonal() * dec.eigenvectors().transpose();
  CHECK((a - rec).norm() <= 1e-9 * a.norm());
  CHECK(dec.eigenvalues().cwiseAbs().minCoeff() >= 16.0 * (1.0 - 1e-12));
}

TEST_CASE("projectors") {
  auto b = basis_of(graphs::line(1.0), 0.05);
  auto dec = eigendecompose(DiracOperator(b, 1.0, 5.0));
  Eigen::VectorXd v = dec.positive_vectors().col(3);
  CHECK((project(dec, v, SpectralSign::Positive) - v).norm() < 1e-12);
  CHECK(project(dec, v, SpectralSign::Negative).norm() < 1e-12);
  CHECK(std::pow(c_norm(dec, v), 2) == doctest::Approx(dec.positive_values()[3]).epsilon(1e-12));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXcd z(dec.dim());
    for (int i = 0; i < dec.dim(); ++i) z[i] = cplx(gauss(rng), gauss(rng));
    Eigen::VectorXcd sum = project(dec, z, SpectralSign::Positive) + project(dec, z, SpectralSign::Negative);
    CHECK((sum - z).norm() < 1e-12 * z.norm());
    CHECK(std::pow(c_norm(dec, z), 2) >= dec.rest_energy() * z.squaredNorm() * (1.0 - 1e-12));
    CHECK(c_inner(dec, z, z) == doctest::Approx(std::pow(c_norm(dec, z), 2)).epsilon(1e-12));
  }
}

TEST_CASE("split of the sine test function") {
  const double m = 1.0, c = 10.0, b_exact = pi * pi;
  auto b = basis_of(graphs::line(1.0), 0.01);
  auto dec = eigendecompose(DiracOperator(b, m, c));
  auto phi = test_function(b->mesh, TestFamily::Sine);
  auto minus = project(dec, phi, SpectralSign::Negative);
  auto plus = project(dec, phi, SpectralSign::Positive);
  double minus2 = std::pow(norm(minus, NormKind::L2), 2);
  CHECK(minus2 <= b_exact / (2.0 * m * m * c * c));
  CHECK(minus2 > 0.0);
  CHECK(std::pow(c_norm(dec, plus), 2) >= m * c * c - b_exact / (2.0 * m));
}

TEST_CASE("dense limit") {
  auto b = basis_of(graphs::line(1.0), 1e-3, 3.5);
  CHECK(b->dim() > kDenseEigenLimit);
  CHECK_THROWS_AS(eigendecompose(DiracOperator(b, 1.0, 1.0)), Error);
}
