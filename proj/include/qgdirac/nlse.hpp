#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qgdirac/fields.hpp"
#include "qgdirac/operators.hpp"

namespace qgdirac {

/// Sign convention of the limit equation solved by solve_nlse.
inline constexpr const char* kNlseSignConvention = "-g'' - lambda g = 2 m chi_K |g|^(p-2) g";

struct NlseOptions {
  double mass = 1.0;
  double flow_tol = 1e-12;    ///< stop the flow once the energy decrease drops below this
  double newton_tol = 1e-10;  ///< residual target for the Newton polish
  int max_flow_steps = 20000;
  int max_newton = 50;
  int seed_edge = -1;         ///< core edge carrying the initial bump, -1 for the longest
  double decay_tol = 1e-8;    ///< admissible mass in the outer tenth of each truncated half-line
};

/// Normalized solution of -g″ - λg = 2m χ_𝒦 |g|^{p-2} g with ‖g‖₂² = mass.
struct NlseSolution {
  ScalarField g;
  double m = 0.0;
  double p = 0.0;
  double lambda = 0.0;
  double mass = 0.0;
  double energy = 0.0;     ///< E_m(g)
  double residual = 0.0;   ///< discrete L² norm of the equation residual
  double kirchhoff = 0.0;  ///< max |Σ outgoing derivatives| over free vertices
  int flow_steps = 0;
  int newton_iters = 0;
  std::vector<double> flow_energies;  ///< E_m after every accepted flow step
};

/// Constrained gradient flow followed by Newton on the bordered system.
/// Throws NoDecay, FlowStagnation, NewtonDivergence.
NlseSolution solve_nlse(std::shared_ptr<const Mesh> mesh, double m, double p, const NlseOptions& opts = {});
NlseSolution solve_nlse(std::shared_ptr<const MetricGraph> graph, double m, double p, double h, double L,
                        const NlseOptions& opts = {});

/// One solve per core edge as seed, sorted by energy.
std::vector<NlseSolution> solve_nlse_multistart(std::shared_ptr<const Mesh> mesh, double m, double p,
                                                const NlseOptions& opts = {});

/// E_m(u) = ½‖u′‖₂² - (2m/p) ∫_𝒦 |u|^p.
double energy_Em(const ScalarField& u, double m, double p);

/// ⟨g, -g″ - 2m χ_𝒦 |g|^{p-2} g⟩ in the discrete L² product.
double nonlinear_rayleigh(const ScalarField& g, double m, double p);

/// Discrete L² norm of -g″ - λg - 2m χ_𝒦 |g|^{p-2} g.
double nlse_residual(const ScalarField& g, double lambda, double m, double p);

/// Max over free vertices of |Σ_{e≻v} dg_e/dx_e(v)|.
double kirchhoff_residual(const NlseSolution& s);

/// Change of variables u ↦ (2m)^{1/(p-2)} u that removes the coefficient 2m.
double coefficient_scale(double m, double p);
/// Mass (2m)^{2/(p-2)} of the rescaled problem with unit coefficient.
double scaled_mass(double m, double p);

}  // namespace qgdirac
