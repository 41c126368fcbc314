#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgdirac/nlse.hpp"
#include "qgdirac/operators.hpp"
#include "qgdirac/spectral.hpp"

namespace qgdirac {

struct SolverParams {
  double m = 1.0;
  double c = 10.0;
  double p = 3.0;
  double h = 0.01;
  double L = 30.0;
  double newton_tol = 1e-10;
  int max_newton = 50;
  /// Speeds of light to visit; solved from the largest down.
  std::vector<double> c_schedule;

  void validate() const;
};

/// Normalized solution of D_c u - ω u = χ_𝒦 |u|^{p-2} u, ‖u‖₂ = 1, with u¹
/// real and u² purely imaginary.
struct NldeSolution {
  SpinorField u;
  Eigen::VectorXd z;  ///< real-ansatz coordinates of u
  double m = 0.0;
  double c = 0.0;
  double p = 0.0;
  double omega = 0.0;
  double mass = 0.0;
  double action = 0.0;    ///< I_{0,c}(u)
  double residual = 0.0;  ///< discrete L² norm of D u - ω u - χ_𝒦|u|^{p-2}u
  int newton_iters = 0;
};

struct NldeGuess {
  SpinorField u;
  double omega = 0.0;
};

/// I_{ω,c}(u) = ½‖u⁺‖_c² - ½‖u⁻‖_c² - (ω/2)‖u‖₂² - Ψ(u), through the spectral split.
double action(const SpectralDecomposition& dec, const SpinorField& u, double omega, double p);
/// Same functional as ½⟨u, D u⟩ - (ω/2)‖u‖₂² - Ψ(u), without a decomposition.
double action(const DiracOperator& op, const SpinorField& u, double omega, double p);
/// Ψ(u) = (1/p) ∫_𝒦 |u|^p.
double core_potential(const SpinorField& u, double p);

/// Discrete L² norm of D u - ω u - χ_𝒦 |u|^{p-2} u.
double nlde_residual(const DiracOperator& op, const SpinorField& u, double omega, double p);
/// ⟨u, D u - χ_𝒦 |u|^{p-2} u⟩ / ‖u‖₂².
double nlde_multiplier(const DiracOperator& op, const SpinorField& u, double p);

/// Both sides of ‖D u‖₂² = c²‖u′‖₂² + m²c⁴‖u‖₂² = ω²‖u‖₂² + 2ω∫_𝒦|u|^p + ∫_𝒦|u|^{2p-2}.
struct EnergyIdentity {
  double operator_side = 0.0;  ///< c²‖u′‖₂² + m²c⁴‖u‖₂²
  double equation_side = 0.0;  ///< ω²‖u‖₂² + 2ω∫|u|^p + ∫|u|^{2p-2}
  double relative_gap() const;
};
EnergyIdentity energy_identity(const DiracOperator& op, const NldeSolution& s);

struct ReducedMapInfo {
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Maximizer w ∈ Y⁻ of w ↦ I_{0,c}(v + w) for v in the positive subspace, by
/// damped Newton on the negative-eigenvector coefficients. Vectors live in
/// real-ansatz coordinates. Throws ConcavityLoss.
Eigen::VectorXd reduced_map_h(const SpectralDecomposition& dec, const Eigen::VectorXd& v_plus, double p,
                              const Eigen::VectorXd* warm_start = nullptr, ReducedMapInfo* info = nullptr);
/// J_c(v) = I_{0,c}(v + h(v)).
double reduced_functional(const SpectralDecomposition& dec, const Eigen::VectorXd& v_plus, double p,
                          const Eigen::VectorXd* warm_start = nullptr);

enum class TestFamily { Sine, Tent };

struct EcEstimate {
  double c = 0.0, m = 0.0, p = 0.0;
  TestFamily family = TestFamily::Sine;
  double a = 0.0;             ///< tent slope (tent family only)
  double estimate = 0.0;      ///< max of J_c along the ray
  double t_at_max = 0.0;
  double t_max = 0.0;         ///< ‖v⁺‖₂⁻¹
  double bound = 0.0;         ///< the stated upper bound without o(1)
  double corrected_bound = 0.0;  ///< tent family with the 1/p factor restored; equals bound for sine
  double slack = 0.0;         ///< bound - estimate
  double half_rest_energy = 0.0;  ///< mc²/2, the existence threshold
  bool ray_monotone = true;   ///< no interior local max below the endpoint value minus 1e-8
  std::vector<double> t, j;   ///< sampled ray
};

/// Test function for the level estimate, unit discrete L² mass, u² = 0.
SpinorField test_function(std::shared_ptr<const Mesh> mesh, TestFamily family, double a = 1.0);

/// b_a = N a / (N/(3a) + |𝒦|), the squared derivative norm of the normalized tent.
double tent_derivative_norm2(int half_lines, double core_length, double a);

EcEstimate estimate_ec(const SpectralDecomposition& dec, double p, TestFamily family, double a = 1.0,
                       int grid = 512);

/// 0 for 2 < p < 4, (pπ²/4) ℓ^{p/2-3} for 4 ≤ p < 6.
double m0_threshold(double p, double ell);

/// Seed from a limit solution: u¹ = g, u² = -i c g′/(ω₀ + mc²), ω₀ = mc² + λ/m,
/// renormalized to unit mass.
NldeGuess initial_guess(const NlseSolution& nlse, double m, double c);

/// Newton on (D z - ω z - ∇Ψ(z), ½(1 - |z|²)) in real-ansatz coordinates.
/// Throws DegenerateInput, NewtonDivergence, GapViolation.
NldeSolution solve_nlde(const DiracOperator& op, double p, const NldeGuess& guess, double newton_tol = 1e-10,
                        int max_newton = 50);

/// Seed at speed c from a solution at another speed: same z with u² rescaled
/// by c/c_prev and the whole vector renormalized, ω shifted by m(c² - c_prev²).
NldeGuess continuation_seed(const NldeSolution& prev, const ConstraintBasis& basis, double c);

/// Solves the NLDE for every speed in params.c_schedule by continuation from
/// the limit solution (largest c first). Returned in ascending c.
std::vector<NldeSolution> continuation(const NlseSolution& nlse, const SolverParams& params);

/// C(σ,m,p) = max{m^{2/(6-p)}, σ^{2/(p-6)}} (2S_p + 2p S_∞^{p-2}/(p-2))^{2/(6-p)}.
double a_priori_constant(double sigma, double m, double p, double s_p, double s_inf);

struct BoundReport {
  double constant = 0.0;     ///< C evaluated with the safety-scaled constants
  double h1_norm = 0.0;
  double omega = 0.0;
  double omega_floor = 0.0;  ///< mc² - 2 S_p C^{(p-2)/2} - slack
  double safety = 2.0;
  bool h1_ok = false;
  bool omega_ok = false;
  bool passed() const { return h1_ok && omega_ok; }
};

/// Evaluates the a priori H¹ bound and the multiplier floor. S constants are
/// multiplied by `safety` before use. Throws BoundViolated when `strict`.
BoundReport a_priori_bound_check(const NldeSolution& s, double sigma, double s_p, double s_inf,
                                 double safety = 2.0, double omega_slack = 0.0, bool strict = false);

}  // namespace qgdirac
