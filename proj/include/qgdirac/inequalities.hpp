#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "qgdirac/fields.hpp"
#include "qgdirac/spectral.hpp"

namespace qgdirac {

struct InequalityReport {
  std::string id;
  int samples = 0;
  double max_ratio = 0.0;  ///< empirical constant (or min LHS/RHS for lower bounds)
  /// Bound the ratio must respect for a sample to count as valid; +inf if none.
  double certified_bound = std::numeric_limits<double>::infinity();
  int violations = 0;
  int worst_sample = -1;
};

/// Compactly supported random fields: one to three cos² bumps with random
/// complex amplitudes on random edges, plus vertex-centred spikes.
std::vector<SpinorField> random_bump_fields(std::shared_ptr<const Mesh> mesh, int count, std::uint64_t seed);

/// Gaussian combinations of the `modes` lowest-|ν| eigenvectors with weights
/// (1+k)^{-1}, mixed with bump fields (40% spectral, 40% bumps, 20% spikes).
std::vector<SpinorField> random_fields(const SpectralDecomposition& dec, int count, std::uint64_t seed,
                                       int modes = 40);

/// ∫_𝒢|u|^p ≥ |supp u|^{1-p/2} (∫_𝒢|u|²)^{p/2} with the cell rule on both
/// sides. max_ratio holds the smallest observed LHS/RHS.
InequalityReport check_support_inequality(const std::vector<SpinorField>& samples, double p);

struct GnConstants {
  InequalityReport form;       ///< ∫_𝒦|u|^p / (‖u‖_c^{p-2} ‖u‖₂²)
  InequalityReport sobolev;    ///< ∫_𝒦|u|^p / (‖u‖_{H¹}^{p/2-1} ‖u‖₂^{p/2+1})
  InequalityReport sup;        ///< ‖u‖_{L∞(𝒦)} / (‖u‖_{H¹}^{1/2} ‖u‖₂^{1/2})
  InequalityReport monotone;   ///< ∫_𝒦|u|^p ≤ ∫_𝒢|u|^p
  double c_p() const { return form.max_ratio; }
  double s_p() const { return sobolev.max_ratio; }
  double s_inf() const { return sup.max_ratio; }
};

/// Max ratios over the samples, then refined by local ascent within the span
/// of the `ascent_modes` lowest-|ν| eigenvectors. Violations are counted
/// against bounds that hold exactly for the discretization:
/// S_∞² ≤ 2 + 1/ℓ_min, S_p ≤ S_∞^{p-2}, and the form constant through
/// ‖u‖_{H¹}² ≤ ‖u‖₂² + ν_max ‖u‖_c² / c².
GnConstants estimate_gn_constants(const SpectralDecomposition& dec, double p, const std::vector<SpinorField>& samples,
                                  int ascent_modes = 12, int ascent_iters = 60);

struct ProjectorReport {
  InequalityReport bound;         ///< ∫_𝒦|u±|^p ≤ S_p (mc)^{p/2-1} ‖u‖_{H¹}^{p/2-1} ‖u±‖₂^{p/2+1}
  InequalityReport intermediate;  ///< ‖u±‖_{H¹}² ≤ m²c² ‖u‖_{H¹}² (1 + 1e-8)
};

/// Both signs are checked for every sample. Throws PreconditionViolated if c < 1/m.
ProjectorReport check_projector_bound(const SpectralDecomposition& dec, double p, double s_p,
                                      const std::vector<SpinorField>& samples);

}  // namespace qgdirac
