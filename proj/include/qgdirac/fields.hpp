#pragma once

#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "qgdirac/mesh.hpp"

namespace qgdirac {

using cplx = std::complex<double>;

/// Real scalar function sampled at the node DOFs of a mesh.
struct ScalarField {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd values;  ///< one entry per node DOF

  static ScalarField zeros(std::shared_ptr<const Mesh> mesh);
  /// Samples f(edge, x) on every free node. Pinned nodes stay zero; a vertex
  /// takes the value of the first edge that touches it.
  static ScalarField sample(std::shared_ptr<const Mesh> mesh, const std::function<double(int edge, double x)>& f);

  /// Value at local node j of edge grid ge (zero on pinned nodes).
  double at(int ge, int j) const;
};

/// Two-component spinor: u¹ on nodes, u² on midpoints.
struct SpinorField {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXcd upper;  ///< u¹, one entry per node DOF
  Eigen::VectorXcd lower;  ///< u², one entry per midpoint

  static SpinorField zeros(std::shared_ptr<const Mesh> mesh);
  static SpinorField from_scalar(const ScalarField& s);

  cplx upper_at(int ge, int j) const;
  SpinorField& operator*=(cplx s);
};

enum class NormKind { L2, Lp, Linf, H1 };
enum class Region { Graph, Core };

/// Discrete norms. L2 uses the trapezoid rule on nodes (plus the midpoint rule
/// for u²); Lp and Linf use cell values (node average for u¹, the midpoint
/// value for u²); H1 adds the staggered derivative.
double norm(const ScalarField& f, NormKind kind, Region region = Region::Graph, double p = 2.0);
double norm(const SpinorField& f, NormKind kind, Region region = Region::Graph, double p = 2.0);

/// ∫|u|^p with the cell midpoint rule.
double integral_pow(const ScalarField& f, double p, Region region = Region::Graph);
double integral_pow(const SpinorField& f, double p, Region region = Region::Graph);

/// ‖u′‖₂² where u¹′ lives on midpoints and u²′ on nodes (the adjoint
/// difference, which absorbs the signed vertex sums of u²).
double derivative_norm2(const ScalarField& f, Region region = Region::Graph);
double derivative_norm2(const SpinorField& f, Region region = Region::Graph);

/// Forward difference of node values, one entry per midpoint.
Eigen::VectorXd node_gradient(const Mesh& mesh, const Eigen::VectorXd& node_values);
Eigen::VectorXcd node_gradient(const Mesh& mesh, const Eigen::VectorXcd& node_values);
/// Adjoint difference of midpoint values, one entry per node DOF:
/// (Σ_e (v_{j-1/2} - v_{j+1/2})) / weight, missing neighbours count as 0.
Eigen::VectorXcd midpoint_divergence(const Mesh& mesh, const Eigen::VectorXcd& mid_values);

/// Total length of cells where the cell value exceeds eps in modulus.
double support_measure(const ScalarField& f, double eps = 0.0);
double support_measure(const SpinorField& f, double eps = 0.0);

/// Signed sum Σ_{e≻v} u_e²(v)_± per vertex, using second-order extrapolation
/// from the two nearest midpoints. Entries for vertices without edges are 0.
Eigen::VectorXcd vertex_lower_trace_sums(const SpinorField& f);

/// Signed outgoing-derivative sum Σ_{e≻v} dg_e/dx_e(v) per vertex using
/// one-sided second-order stencils.
Eigen::VectorXd vertex_flux_sums(const ScalarField& f);

}  // namespace qgdirac
