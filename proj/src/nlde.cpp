#include "qgdirac/nlde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SparseLU>

#include "qgdirac/errors.hpp"
#include "qgdirac/nonlinearity.hpp"

namespace qgdirac {

void SolverParams::validate() const {
  if (!(m > 0.0) || !(c > 0.0)) throw Error(ErrorCode::PreconditionViolated, "m and c must be positive");
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorCode::DomainError, "p must lie in (2, 6)");
  if (!(h > 0.0) || !(L > 0.0)) throw Error(ErrorCode::PreconditionViolated, "h and L must be positive");
  for (double s : c_schedule) {
    if (!(s > 0.0)) throw Error(ErrorCode::PreconditionViolated, "speeds of light must be positive");
  }
}

double core_potential(const SpinorField& u, double p) { return integral_pow(u, p, Region::Core) / p; }

double action(const SpectralDecomposition& dec, const SpinorField& u, double omega, double p) {
  Eigen::VectorXcd a = dec.coefficients(dec.basis().to_rotated(u));
  double split = 0.5 * (dec.eigenvalues().array() * a.array().abs2()).sum();
  return split - 0.5 * omega * a.squaredNorm() - core_potential(u, p);
}

double action(const DiracOperator& op, const SpinorField& u, double omega, double p) {
  Eigen::VectorXcd z = op.basis().to_rotated(u);
  double quad = z.dot(op.apply(z)).real();
  return 0.5 * quad - 0.5 * omega * z.squaredNorm() - core_potential(u, p);
}

double nlde_residual(const DiracOperator& op, const SpinorField& u, double omega, double p) {
  CoreNonlinearity psi(op.basis_ptr(), p, true);
  Eigen::VectorXcd z = op.basis().to_rotated(u);
  Eigen::VectorXcd r(z.size());
  r.real() = op.apply_shifted(z.real(), omega);
  r.imag() = op.apply_shifted(z.imag(), omega);
  return (r - psi.gradient(z)).norm();
}

double nlde_multiplier(const DiracOperator& op, const SpinorField& u, double p) {
  CoreNonlinearity psi(op.basis_ptr(), p, true);
  Eigen::VectorXcd z = op.basis().to_rotated(u);
  return z.dot(op.apply(z) - psi.gradient(z)).real() / z.squaredNorm();
}

double EnergyIdentity::relative_gap() const {
  return std::abs(operator_side - equation_side) / std::abs(operator_side);
}

EnergyIdentity energy_identity(const DiracOperator& op, const NldeSolution& s) {
  const double m = op.mass(), c = op.speed();
  double l2 = std::pow(norm(s.u, NormKind::L2), 2);
  EnergyIdentity e;
  e.operator_side = c * c * derivative_norm2(s.u) + m * m * std::pow(c, 4) * l2;
  CoreNonlinearity psi(op.basis_ptr(), s.p, true);
  Eigen::VectorXcd z = op.basis().to_rotated(s.u);
  double high = psi.gradient(z).squaredNorm();
  e.equation_side = s.omega * s.omega * l2 + 2.0 * s.omega * integral_pow(s.u, s.p, Region::Core) + high;
  return e;
}

Eigen::VectorXd reduced_map_h(const SpectralDecomposition& dec, const Eigen::VectorXd& v_plus, double p,
                              const Eigen::VectorXd* warm_start, ReducedMapInfo* info) {
  if (v_plus.size() != dec.dim()) throw Error(ErrorCode::DimensionMismatch, "vector does not match the decomposition");
  const auto vn = dec.negative_vectors();
  const Eigen::VectorXd nu = dec.negative_values().cwiseAbs();
  CoreNonlinearity psi(dec.basis_ptr(), p, true);

  Eigen::VectorXd a = warm_start ? Eigen::VectorXd(vn.transpose() * *warm_start) : Eigen::VectorXd::Zero(nu.size());
  auto objective = [&](const Eigen::VectorXd& coef) {
    return -0.5 * nu.dot(coef.cwiseAbs2()) - psi.value(Eigen::VectorXd(v_plus + vn * coef));
  };
  double f = objective(a);
  int it = 0;
  double gnorm = 0.0;
  for (; it < 100; ++it) {
    Eigen::VectorXd z = v_plus + vn * a;
    Eigen::VectorXd grad = -nu.cwiseProduct(a) - vn.transpose() * psi.gradient(z);
    gnorm = grad.norm();
    if (gnorm <= 1e-10) break;
    Eigen::MatrixXd curv = psi.projected_hessian(z, vn);
    curv.diagonal() += nu;
    Eigen::LLT<Eigen::MatrixXd> llt(curv);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::ConcavityLoss, "restriction to the negative subspace is not strictly concave");
    }
    Eigen::VectorXd step = llt.solve(grad);
    double slope = grad.dot(step);
    double alpha = 1.0;
    bool moved = false;
    while (alpha > 1e-12) {
      Eigen::VectorXd trial = a + alpha * step;
      double ft = objective(trial);
      if (ft >= f + 1e-4 * alpha * slope || alpha * step.norm() < 1e-15 * (1.0 + a.norm())) {
        moved = ft >= f;
        if (moved) {
          a = std::move(trial);
          f = ft;
        }
        break;
      }
      alpha *= 0.5;
    }
    // Round-off floor: a full Newton step that cannot raise f any more.
    if (!moved) {
      a += step;
      z = v_plus + vn * a;
      gnorm = (-nu.cwiseProduct(a) - vn.transpose() * psi.gradient(z)).norm();
      ++it;
      break;
    }
  }
  if (info) {
    info->iterations = it;
    info->gradient_norm = gnorm;
  }
  return vn * a;
}

double reduced_functional(const SpectralDecomposition& dec, const Eigen::VectorXd& v_plus, double p,
                          const Eigen::VectorXd* warm_start) {
  Eigen::VectorXd w = reduced_map_h(dec, v_plus, p, warm_start);
  CoreNonlinearity psi(dec.basis_ptr(), p, true);
  Eigen::VectorXd a = dec.coefficients(Eigen::VectorXd(v_plus + w));
  return 0.5 * dec.eigenvalues().dot(a.cwiseAbs2()) - psi.value(Eigen::VectorXd(v_plus + w));
}

SpinorField test_function(std::shared_ptr<const Mesh> mesh, TestFamily family, double a) {
  const MetricGraph& graph = *mesh->graph;
  ScalarField f = ScalarField::zeros(mesh);
  if (family == TestFamily::Sine) {
    const int e0 = graph.longest_core_edge();
    const double len = graph.edges()[e0].length;
    f = ScalarField::sample(mesh, [&](int e, double x) {
      return e == e0 ? std::sqrt(2.0 / len) * std::sin(std::numbers::pi * x / len) : 0.0;
    });
  } else {
    if (!(a > 0.0)) throw Error(ErrorCode::PreconditionViolated, "tent slope must be positive");
    f = ScalarField::sample(mesh, [&](int e, double x) {
      return graph.edges()[e].kind == EdgeKind::Bounded ? 1.0 : std::max(0.0, 1.0 - a * x);
    });
  }
  f.values /= norm(f, NormKind::L2);
  return SpinorField::from_scalar(f);
}

double tent_derivative_norm2(int half_lines, double core_length, double a) {
  return half_lines * a / (half_lines / (3.0 * a) + core_length);
}

EcEstimate estimate_ec(const SpectralDecomposition& dec, double p, TestFamily family, double a, int grid) {
  if (grid < 3) throw Error(ErrorCode::PreconditionViolated, "ray grid needs at least three points");
  const auto& basis = dec.basis();
  const MetricGraph& graph = *basis.mesh->graph;
  const double m = dec.mass(), c = dec.speed(), mc2 = dec.rest_energy();

  EcEstimate out;
  out.c = c;
  out.m = m;
  out.p = p;
  out.family = family;
  out.a = family == TestFamily::Tent ? a : 0.0;
  out.half_rest_energy = 0.5 * mc2;

  Eigen::VectorXd phi = basis.to_ansatz(test_function(basis.mesh, family, a));
  Eigen::VectorXd v = project(dec, phi, SpectralSign::Positive);
  out.t_max = 1.0 / v.norm();

  Eigen::VectorXd warm = Eigen::VectorXd::Zero(dec.dim());
  auto j_at = [&](double t) {
    Eigen::VectorXd vt = t * v;
    Eigen::VectorXd w = reduced_map_h(dec, vt, p, &warm);
    warm = w;
    CoreNonlinearity psi(dec.basis_ptr(), p, true);
    Eigen::VectorXd coef = dec.coefficients(Eigen::VectorXd(vt + w));
    return 0.5 * dec.eigenvalues().dot(coef.cwiseAbs2()) - psi.value(Eigen::VectorXd(vt + w));
  };

  out.t.resize(grid);
  out.j.resize(grid);
  int best = 0;
  for (int i = 0; i < grid; ++i) {
    out.t[i] = out.t_max * i / (grid - 1);
    out.j[i] = j_at(out.t[i]);
    if (out.j[i] > out.j[best]) best = i;
  }
  out.estimate = out.j[best];
  out.t_at_max = out.t[best];

  // Golden-section refinement around the sampled maximum.
  double lo = out.t[std::max(best - 1, 0)], hi = out.t[std::min(best + 1, grid - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = j_at(x1), f2 = j_at(x2);
  for (int k = 0; k < 60 && hi - lo > 1e-14 * out.t_max; ++k) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = j_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = j_at(x1);
    }
  }
  if (std::max(f1, f2) > out.estimate) {
    out.estimate = std::max(f1, f2);
    out.t_at_max = f1 > f2 ? x1 : x2;
  }

  const double endpoint = out.j.back();
  for (int i = 1; i + 1 < grid; ++i) {
    if (out.j[i] > out.j[i - 1] && out.j[i] > out.j[i + 1] && out.j[i] < endpoint - 1e-8) out.ray_monotone = false;
  }

  if (family == TestFamily::Sine) {
    const double ell = graph.edges()[graph.longest_core_edge()].length;
    const double b = std::pow(std::numbers::pi / ell, 2);
    out.bound = 0.5 * mc2 + b / (4.0 * m) - std::pow(ell, 1.0 - 0.5 * p) / p;
    out.corrected_bound = out.bound;
  } else {
    const int n = graph.half_line_count();
    const double k = graph.core_length();
    const double ba = tent_derivative_norm2(n, k, a);
    const double d = std::pow(n / (3.0 * a) + k, 0.5 * p);
    out.bound = 0.5 * mc2 + ba / (4.0 * m) - k / d;
    out.corrected_bound = 0.5 * mc2 + ba / (4.0 * m) - k / (p * d);
  }
  out.slack = out.bound - out.estimate;
  return out;
}

double m0_threshold(double p, double ell) {
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorCode::DomainError, "p must lie in (2, 6)");
  if (!(ell > 0.0)) throw Error(ErrorCode::PreconditionViolated, "edge length must be positive");
  if (p < 4.0) return 0.0;
  return p * std::numbers::pi * std::numbers::pi / 4.0 * std::pow(ell, 0.5 * p - 3.0);
}

NldeGuess initial_guess(const NlseSolution& nlse, double m, double c) {
  if (!(m > 0.0) || !(c > 0.0)) throw Error(ErrorCode::PreconditionViolated, "m and c must be positive");
  auto basis = std::make_shared<const ConstraintBasis>(constraint_basis(nlse.g.mesh));
  const double mc2 = m * c * c;
  NldeGuess guess;
  guess.omega = mc2 + nlse.lambda / m;
  Eigen::VectorXd z(basis->dim());
  z.head(basis->node_dim()) = basis->to_coords(nlse.g);
  z.tail(basis->mid_dim()) = -c * (basis->gradient * z.head(basis->node_dim())) / (guess.omega + mc2);
  z /= z.norm();
  guess.u = basis->from_ansatz(z);
  return guess;
}

namespace {

NldeSolution newton(const DiracOperator& op, double p, Eigen::VectorXd z, double omega, double tol, int max_newton) {
  const int n = op.dim();
  const double mc2 = op.rest_energy();
  CoreNonlinearity psi(op.basis_ptr(), p, true);

  auto residual = [&](const Eigen::VectorXd& v, double w, Eigen::VectorXd& f1, double& f2) {
    f1 = op.apply_shifted(v, w) - psi.gradient(v);
    f2 = 0.5 * (1.0 - v.squaredNorm());
    return std::sqrt(f1.squaredNorm() + f2 * f2);
  };
  Eigen::VectorXd f1;
  double f2;
  double fnorm = residual(z, omega, f1, f2);
  int it = 0;
  while (f1.norm() > tol || std::abs(f2) > 1e-14) {
    if (it >= max_newton) {
      throw Error(ErrorCode::NewtonDivergence,
                  "NLDE Newton did not converge in " + std::to_string(max_newton) + " iterations");
    }
    ++it;
    SparseMatrix hess = psi.hessian(z);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(op.matrix().nonZeros() + hess.nonZeros() + 2 * n + n);
    for (int k = 0; k < op.matrix().outerSize(); ++k) {
      for (SparseMatrix::InnerIterator itr(op.matrix(), k); itr; ++itr) {
        double v = itr.value();
        if (itr.row() == itr.col()) v -= omega;
        t.emplace_back(itr.row(), itr.col(), v);
      }
    }
    for (int k = 0; k < hess.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator itr(hess, k); itr; ++itr) t.emplace_back(itr.row(), itr.col(), -itr.value());
    }
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, n, -z[i]);
      t.emplace_back(n, i, -z[i]);
    }
    SparseMatrix jac(n + 1, n + 1);
    jac.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(jac);
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::NewtonDivergence, "singular NLDE Jacobian");
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -f1;
    rhs[n] = -f2;
    Eigen::VectorXd d = lu.solve(rhs);
    double alpha = 1.0;
    for (;;) {
      Eigen::VectorXd zt = z + alpha * d.head(n);
      double wt = omega + alpha * d[n];
      Eigen::VectorXd g1;
      double g2;
      double ft = residual(zt, wt, g1, g2);
      if (ft < (1.0 - 1e-4 * alpha) * fnorm || alpha < 1e-4) {
        z = std::move(zt);
        omega = wt;
        f1 = std::move(g1);
        f2 = g2;
        fnorm = ft;
        break;
      }
      alpha *= 0.5;
    }
  }
  z /= z.norm();

  NldeSolution s;
  s.z = z;
  s.u = op.basis().from_ansatz(z);
  s.m = op.mass();
  s.c = op.speed();
  s.p = p;
  s.omega = omega;
  s.mass = z.squaredNorm();
  s.action = 0.5 * z.dot(op.apply(z)) - psi.value(z);
  s.residual = (op.apply_shifted(z, omega) - psi.gradient(z)).norm();
  s.newton_iters = it;
  if (!(omega >= 0.0 && omega < mc2)) {
    throw Error(ErrorCode::GapViolation,
                "multiplier " + std::to_string(omega) + " outside [0, " + std::to_string(mc2) + ")");
  }
  return s;
}

}  // namespace

NldeSolution solve_nlde(const DiracOperator& op, double p, const NldeGuess& guess, double newton_tol,
                        int max_newton) {
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorCode::DomainError, "p must lie in (2, 6)");
  Eigen::VectorXd z = op.basis().to_ansatz(guess.u);
  if (z.norm() == 0.0 || !std::isfinite(z.norm())) {
    throw Error(ErrorCode::DegenerateInput, "the zero field is the trivial branch");
  }
  z /= z.norm();
  return newton(op, p, std::move(z), guess.omega, newton_tol, max_newton);
}

NldeGuess continuation_seed(const NldeSolution& prev, const ConstraintBasis& basis, double c) {
  Eigen::VectorXd z = prev.z;
  z.tail(basis.mid_dim()) *= c / prev.c;  // u² scales like 1/c
  z /= z.norm();
  NldeGuess guess;
  guess.u = basis.from_ansatz(z);
  guess.omega = prev.omega + prev.m * (c * c - prev.c * prev.c);
  return guess;
}

std::vector<NldeSolution> continuation(const NlseSolution& nlse, const SolverParams& params) {
  params.validate();
  std::vector<double> speeds = params.c_schedule.empty() ? std::vector<double>{params.c} : params.c_schedule;
  std::sort(speeds.begin(), speeds.end(), std::greater<>());
  auto basis = std::make_shared<const ConstraintBasis>(constraint_basis(nlse.g.mesh));
  std::vector<NldeSolution> out;
  NldeGuess guess = initial_guess(nlse, params.m, speeds.front());
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    const double c = speeds[i];
    if (i > 0) guess = continuation_seed(out.back(), *basis, c);
    DiracOperator op(basis, params.m, c);
    out.push_back(solve_nlde(op, params.p, guess, params.newton_tol, params.max_newton));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double a_priori_constant(double sigma, double m, double p, double s_p, double s_inf) {
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorCode::DomainError, "p must lie in (2, 6)");
  if (!(sigma > 0.0) || !(m > 0.0)) throw Error(ErrorCode::PreconditionViolated, "sigma and m must be positive");
  double lead = std::max(std::pow(m, 2.0 / (6.0 - p)), std::pow(sigma, 2.0 / (p - 6.0)));
  double inner = 2.0 * s_p + 2.0 * p * std::pow(s_inf, p - 2.0) / (p - 2.0);
  return lead * std::pow(inner, 2.0 / (6.0 - p));
}

BoundReport a_priori_bound_check(const NldeSolution& s, double sigma, double s_p, double s_inf, double safety,
                                 double omega_slack, bool strict) {
  BoundReport r;
  r.safety = safety;
  const double sp = safety * s_p, si = safety * s_inf;
  r.constant = a_priori_constant(sigma, s.m, s.p, sp, si);
  r.h1_norm = norm(s.u, NormKind::H1);
  r.omega = s.omega;
  r.omega_floor = s.m * s.c * s.c - 2.0 * sp * std::pow(r.constant, 0.5 * (s.p - 2.0)) - omega_slack;
  r.h1_ok = r.h1_norm < r.constant;
  r.omega_ok = r.omega >= r.omega_floor;
  if (strict && !r.passed()) {
    throw Error(ErrorCode::BoundViolated, "a priori bound violated at c = " + std::to_string(s.c));
  }
  return r;
}

}  // namespace qgdirac
