#pragma once

// Secular-equation oracle for the Kirchhoff Laplacian on a compact star.
// Each edge runs from the centre to a tip of degree one. With Dirichlet tips
// an eigenfunction is A_e sin(k(l_e - x)) and the centre conditions reduce to
// sum_e cot(k l_e) = 0; with Neumann tips it is A_e cos(k(l_e - x)) and
// sum_e tan(k l_e) = 0. Roots where the secular function has a pole are
// discarded; values where two or more edges vanish simultaneously are added
// separately.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

enum class Tip { Dirichlet, Neumann };

inline double secular(const std::vector<double>& lengths, Tip tip, double k) {
  double s = 0.0;
  for (double l : lengths) s += tip == Tip::Dirichlet ? std::cos(k * l) / std::sin(k * l) : std::tan(k * l);
  return s;
}

/// Lowest `count` positive wave numbers k (eigenvalues k²), ascending, with
/// multiplicity. A zero mode for Neumann tips is not included.
inline std::vector<double> star_wavenumbers(const std::vector<double>& lengths, Tip tip, int count,
                                            double k_max = 60.0, int scan = 200000) {
  std::vector<double> ks;
  const double dk = k_max / scan;
  double a = dk, fa = secular(lengths, tip, a);
  for (int i = 2; i <= scan && static_cast<int>(ks.size()) < 4 * count; ++i) {
    double b = dk * i, fb = secular(lengths, tip, b);
    if (std::isfinite(fa) && std::isfinite(fb) && fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi), fm = secular(lengths, tip, mid);
        if (flo * fm <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      double k = 0.5 * (lo + hi);
      if (std::abs(secular(lengths, tip, k)) < 1e3) ks.push_back(k);
    }
    a = b;
    fa = fb;
  }
  // Modes supported on two or more edges where the per-edge term has a pole.
  std::vector<double> special;
  for (double l : lengths)
    for (int j = 1; j * M_PI / l <= k_max; ++j) {
      double k = tip == Tip::Dirichlet ? j * M_PI / l : (j - 0.5) * M_PI / l;
      int hits = 0;
      for (double l2 : lengths) {
        double q = tip == Tip::Dirichlet ? k * l2 / M_PI : k * l2 / M_PI + 0.5;
        if (std::abs(q - std::round(q)) < 1e-12) ++hits;
      }
      if (hits >= 2 && std::none_of(special.begin(), special.end(), [&](double s) { return std::abs(s - k) < 1e-9; })) {
        special.push_back(k);
        for (int r = 0; r < hits - 1; ++r) ks.push_back(k);
      }
    }
  std::sort(ks.begin(), ks.end());
  if (static_cast<int>(ks.size()) > count) ks.resize(count);
  return ks;
}

}  // namespace oracle
