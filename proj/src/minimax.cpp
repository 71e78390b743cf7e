#include "increx/minimax.hpp"

#include "increx/error.hpp"
#include "increx/series.hpp"
#include "increx/structured.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <functional>
#include <random>

namespace increx {

namespace {

struct Levinson {
  Eigen::VectorXd a;  // a(1..M) stored at 0..M-1
  Eigen::VectorXd kappa;
  double error = 0.0;
};

Levinson levinson(const Eigen::VectorXd& rho) {
  const int M = static_cast<int>(rho.size()) - 1;
  Levinson out{Eigen::VectorXd::Zero(M), Eigen::VectorXd::Zero(M), rho[0]};
  if (!(rho[0] > 0.0)) throw Error(ErrorKind::MomentInfeasible, "rho(0) must be positive");
  for (int k = 1; k <= M; ++k) {
    double acc = rho[k];
    for (int i = 1; i < k; ++i) acc += out.a[i - 1] * rho[k - i];
    const double kappa = -acc / out.error;
    if (!(std::abs(kappa) < 1.0 - 1e-12)) {
      throw Error(ErrorKind::MomentInfeasible,
                  "Toeplitz matrix of rho is not positive definite (|kappa_" + std::to_string(k) +
                      "| = " + num(std::abs(kappa)) + ")");
    }
    Eigen::VectorXd prev = out.a;
    for (int i = 1; i < k; ++i) out.a[i - 1] = prev[i - 1] + kappa * prev[k - i - 1];
    out.a[k - 1] = kappa;
    out.kappa[k - 1] = kappa;
    out.error *= 1.0 - kappa * kappa;
  }
  return out;
}

void extend(Levinson& lev, double kappa) {
  const int k = static_cast<int>(lev.a.size()) + 1;
  Eigen::VectorXd a(k);
  for (int i = 1; i < k; ++i) a[i - 1] = lev.a[i - 1] + kappa * lev.a[k - i - 1];
  a[k - 1] = kappa;
  lev.a = a;
  lev.error *= 1.0 - kappa * kappa;
}

double bisect_level(const std::function<double(double)>& mean_at, double target, double start) {
  double lo = 0.0, hi = start > 0.0 ? start : 1.0;
  for (int i = 0; i < 400 && mean_at(hi) < target; ++i) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_at(mid) < target) lo = mid;
    else hi = mid;
    if (hi - lo <= 1e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd clamp_vu(const Eigen::VectorXd& q, double t, const Eigen::VectorXd& v,
                         const Eigen::VectorXd& u) {
  return (t * q).cwiseMin(u).cwiseMax(v);
}

struct ClassMap {
  Eigen::VectorXd f;
  Eigen::VectorXd denominator;
  double lower = 0.0, upper = 0.0;
};

// Dual Newton for p = p0 + 2 sum p_m cos(m l) with moments of q / p equal to rho.
Eigen::VectorXd moment_dual(const Eigen::VectorXd& q, const Eigen::VectorXd& rho, const FrequencyGrid& grid) {
  const int M = static_cast<int>(rho.size()) - 1;
  const int G = grid.size();
  Eigen::MatrixXd C(G, M + 1);
  for (int j = 0; j < G; ++j)
    for (int m = 0; m <= M; ++m) C(j, m) = (m == 0 ? 1.0 : 2.0) * std::cos(m * grid.node(j));
  Eigen::VectorXd kr = rho;
  kr.tail(M) *= 2.0;

  auto objective = [&](const Eigen::VectorXd& pv, const Eigen::VectorXd& p) {
    return kr.dot(p) - (q.array() * pv.array().log()).mean();
  };
  Eigen::VectorXd p = Eigen::VectorXd::Zero(M + 1);
  p[0] = q.mean() / rho[0];
  Eigen::VectorXd pv = C * p;
  double J = objective(pv, p);
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd qp = q.cwiseQuotient(pv);
    Eigen::VectorXd grad = kr - C.transpose() * qp / G;
    if (grad.cwiseAbs().maxCoeff() <= 1e-14 * rho[0]) break;
    Eigen::VectorXd wgt = qp.cwiseQuotient(pv);
    Eigen::MatrixXd H = C.transpose() * wgt.asDiagonal() * C / G;
    Eigen::VectorXd step = -H.ldlt().solve(grad);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Eigen::VectorXd pn = p + t * step;
      Eigen::VectorXd pvn = C * pn;
      if (pvn.minCoeff() <= 0.0) continue;
      const double Jn = objective(pvn, pn);
      if (Jn <= J + 1e-4 * t * grad.dot(step) || Jn <= J) {
        p = pn;
        pv = pvn;
        J = Jn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return pv;
}

ClassMap apply_class(const DensityClassSpec& cls, const Eigen::VectorXd& q, const FrequencyGrid& grid) {
  ClassMap out;
  const double qm = q.mean();
  if (!(qm > 0.0)) throw Error(ErrorKind::FixedPointDiverged, "|r|^2 vanishes identically");
  if (auto c = std::get_if<ClassD0>(&cls)) {
    out.f = q * (c->P0 / qm);
  } else if (auto c = std::get_if<ClassDM>(&cls)) {
    Eigen::VectorXd p = moment_dual(q, c->rho, grid);
    out.f = q.cwiseQuotient(p);
    FactorOptions opts;
    opts.truncation = static_cast<int>(c->rho.size()) - 1;
    opts.enforce = false;
    if (opts.truncation > 0) {
      out.denominator = canonical_factorization(DensityGrid(grid, p), opts).coeffs;
    } else {
      out.denominator = Eigen::VectorXd::Constant(1, std::sqrt(p[0]));
    }
  } else if (auto c = std::get_if<ClassDvu>(&cls)) {
    const Eigen::VectorXd& v = c->v.values();
    const Eigen::VectorXd& u = c->u.values();
    if (u.allFinite() && u.mean() <= c->P0) {
      out.f = (q.array() > 0.0).select(u, v);
    } else {
      auto mean_at = [&](double t) { return clamp_vu(q, t, v, u).mean(); };
      out.f = clamp_vu(q, bisect_level(mean_at, c->P0, c->P0 / qm), v, u);
    }
    const int G = grid.size();
    for (int j = 0; j < G; ++j) {
      if (out.f[j] == v[j]) out.lower += 1.0 / G;
      else if (out.f[j] == u[j]) out.upper += 1.0 / G;
    }
  } else {
    const auto& e = std::get<ClassDeps>(cls);
    const Eigen::VectorXd& v = e.v.values();
    const double P1 = e.eps + v.mean();
    auto mean_at = [&](double t) { return (t * q).cwiseMax(v).mean(); };
    out.f = (bisect_level(mean_at, P1, P1 / qm) * q).cwiseMax(v);
    for (int j = 0; j < grid.size(); ++j)
      if (out.f[j] == v[j]) out.lower += 1.0 / grid.size();
  }
  return out;
}

DensityGrid initial_density(const DensityClassSpec& cls, const FrequencyGrid& grid) {
  if (auto c = std::get_if<ClassDM>(&cls)) return max_entropy_density(c->rho, grid);
  if (auto c = std::get_if<ClassDvu>(&cls)) {
    const Eigen::VectorXd& v = c->v.values();
    const Eigen::VectorXd& u = c->u.values();
    auto mean_at = [&](double t) { return Eigen::VectorXd::Constant(v.size(), t).cwiseMin(u).cwiseMax(v).mean(); };
    double t = bisect_level(mean_at, c->P0, c->P0);
    return DensityGrid(grid, Eigen::VectorXd::Constant(v.size(), t).cwiseMin(u).cwiseMax(v));
  }
  if (auto c = std::get_if<ClassDeps>(&cls)) {
    const Eigen::VectorXd& v = c->v.values();
    const double P1 = c->eps + v.mean();
    auto mean_at = [&](double t) { return v.cwiseMax(t).mean(); };
    double t = bisect_level(mean_at, P1, P1);
    return DensityGrid(grid, v.cwiseMax(t));
  }
  return DensityGrid::constant(grid, std::get<ClassD0>(cls).P0);
}

FactorOptions loose_factor(int dim, const FrequencyGrid& grid) {
  FactorOptions opts;
  opts.truncation = std::min(std::max(1024, dim), grid.size() / 2 - 1);
  opts.enforce = false;
  return opts;
}

Eigen::VectorXd pad(const Eigen::VectorXd& x, Eigen::Index length) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(length);
  const Eigen::Index m = std::min(length, x.size());
  y.head(m) = x.head(m);
  return y;
}

// Fills in h0, phi_mu and the extremal value from phi0 and f0. `phi_boundary` is Phi(e^{-i l}) of f0 when
// phi0 is only the head of an infinite factor.
void complete(LeastFavorableResult& res, const ExtremalProblem& problem, const FrequencyGrid& grid,
              const Eigen::VectorXcd& phi_boundary = {}) {
  const int dim = problem.dim();
  res.r0 = problem.M * res.phi0;
  res.extremal_value = res.r0.squaredNorm();
  res.phi_mu = convolve(problem.w, res.phi0, dim);

  OuterFactorW w = outer_factor_w(res.spec, grid, std::min(1024, grid.size() / 2 - 1));
  Eigen::VectorXcd big_phi =
      w.boundary.cwiseProduct(phi_boundary.size() == grid.size() ? phi_boundary : grid.evaluate(res.phi0));
  Eigen::VectorXcd big_b = grid.evaluate(problem.b).conjugate();
  Eigen::VectorXcd big_r = grid.evaluate(res.r0).conjugate();
  const double scale = big_phi.cwiseAbs().maxCoeff();
  Eigen::VectorXcd h(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    h[j] = std::abs(big_phi[j]) > 1e-14 * scale ? big_b[j] - big_r[j] / big_phi[j] : big_b[j];
  }
  res.h0 = SpectralCharacteristic{grid, h, problem.b, res.r0, res.spec, FunctionalKind::Values,
                                  "least_favorable"};
}

bool in_class(const DensityGrid& f, const DensityClassSpec& cls) {
  return class_membership_defect(f, cls) <= 1e-8 * std::max(1.0, class_power(cls));
}

}  // namespace

std::string class_name(const DensityClassSpec& cls) {
  switch (cls.index()) {
    case 0: return "D0";
    case 1: return "DM";
    case 2: return "Dvu";
    default: return "Deps";
  }
}

double class_power(const DensityClassSpec& cls) {
  if (auto c = std::get_if<ClassD0>(&cls)) return c->P0;
  if (auto c = std::get_if<ClassDM>(&cls)) return c->rho.size() ? c->rho[0] : 0.0;
  if (auto c = std::get_if<ClassDvu>(&cls)) return c->P0;
  const auto& e = std::get<ClassDeps>(cls);
  return e.eps + e.v.power();
}

void validate_class(const DensityClassSpec& cls, const FrequencyGrid& grid) {
  if (auto c = std::get_if<ClassD0>(&cls)) {
    if (!(c->P0 > 0.0)) throw Error(ErrorKind::DomainError, "P0 must be positive");
  } else if (auto c = std::get_if<ClassDM>(&cls)) {
    if (c->rho.size() == 0) throw Error(ErrorKind::DomainError, "rho must hold rho(0)");
    if (c->rho.size() > grid.size() / 4) throw Error(ErrorKind::DomainError, "too many moments for the grid");
    levinson(c->rho);
  } else if (auto c = std::get_if<ClassDvu>(&cls)) {
    if (!(c->v.grid() == grid) || !(c->u.grid() == grid)) {
      throw Error(ErrorKind::DomainError, "bounds must be sampled on the working grid");
    }
    if ((c->u.values().array() < c->v.values().array()).any()) {
      throw Error(ErrorKind::InfeasibleBounds, "u < v somewhere");
    }
    if (c->v.power() > c->P0) {
      throw Error(ErrorKind::InfeasibleBounds,
                  "mean(v) = " + num(c->v.power()) + " exceeds P0 = " + num(c->P0));
    }
    if (!(c->P0 > 0.0)) throw Error(ErrorKind::DomainError, "P0 must be positive");
  } else {
    const auto& e = std::get<ClassDeps>(cls);
    if (!(e.v.grid() == grid)) throw Error(ErrorKind::DomainError, "v must be sampled on the working grid");
    if (!(e.eps > 0.0)) throw Error(ErrorKind::DomainError, "eps must be positive");
    if (!e.v.values().allFinite()) throw Error(ErrorKind::DomainError, "v must be finite");
  }
}

double class_membership_defect(const DensityGrid& f, const DensityClassSpec& cls) {
  const Eigen::VectorXd& x = f.values();
  double defect = std::max(0.0, -x.minCoeff());
  if (auto c = std::get_if<ClassD0>(&cls)) {
    defect = std::max(defect, f.power() - c->P0);
  } else if (auto c = std::get_if<ClassDM>(&cls)) {
    const int M = static_cast<int>(c->rho.size()) - 1;
    defect = std::max(defect, (cosine_moments(f, M) - c->rho).cwiseAbs().maxCoeff());
  } else if (auto c = std::get_if<ClassDvu>(&cls)) {
    defect = std::max(defect, (c->v.values() - x).maxCoeff());
    defect = std::max(defect, (x - c->u.values()).maxCoeff());
    defect = std::max(defect, f.power() - c->P0);
  } else {
    const auto& e = std::get<ClassDeps>(cls);
    defect = std::max(defect, (x - e.v.values()).cwiseAbs().mean() - e.eps);
  }
  return std::max(defect, 0.0);
}

ExtremalProblem extremal_problem_finite(const Eigen::VectorXd& a_N, IncrementSpec spec, int N) {
  if (N < 0 || a_N.size() != N + 1) throw Error(ErrorKind::DomainError, "a_N must hold N + 1 coefficients");
  ExtremalProblem p;
  p.spec = spec;
  p.a = a_N;
  p.b = build_D_N(spec, N).matrix * a_N;
  p.w = outer_factor_coeffs(spec, N + 1);
  Eigen::MatrixXd M = build_D_N(spec, N).matrix * build_A_N(a_N, N).matrix * build_W_N(spec, N).matrix;
  p.M = 0.5 * (M + M.transpose());
  p.finite = true;
  return p;
}

ExtremalProblem extremal_problem_infinite(const FunctionalCoefficients& a, IncrementSpec spec, int S) {
  if (S < 1) throw Error(ErrorKind::DomainError, "truncation S must be positive");
  ExtremalProblem p;
  p.spec = spec;
  p.a = a.values();
  p.b = b_from_a(a, spec);
  const Eigen::Index K = p.b.size();
  p.w = outer_factor_coeffs(spec, std::max<Eigen::Index>(K, S));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(K);
  for (Eigen::Index m = 0; m < K; ++m)
    for (Eigen::Index t = 0; m + t < K; ++t) e[m] += p.b[m + t] * p.w[t];
  p.M = hankel(e, S).matrix;
  p.finite = false;
  return p;
}

ExtremalProblem extremal_problem(const FunctionalCoefficients& a, IncrementSpec spec, int S) {
  if (a.is_finite()) return extremal_problem_finite(a.values(), spec, a.horizon());
  return extremal_problem_infinite(a, spec, S);
}

LeastFavorableResult least_favorable(const ExtremalProblem& problem, const DensityClassSpec& cls,
                                     const FrequencyGrid& grid, const MinimaxOptions& options) {
  validate_class(cls, grid);
  const int dim = problem.dim();
  if (dim >= grid.size() / 2) throw Error(ErrorKind::DomainError, "grid too coarse for the problem size");

  LeastFavorableResult res;
  res.class_name = class_name(cls);
  res.spec = problem.spec;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(problem.M);
  const Eigen::VectorXd& evals = eig.eigenvalues();
  std::vector<int> order(evals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return std::abs(evals[i]) > std::abs(evals[j]); });
  res.sigma_max = std::abs(evals[order[0]]);

  if (!problem.finite) {
    Eigen::Index K = problem.b.size();
    Eigen::VectorXd ew = Eigen::VectorXd::Zero(std::max<Eigen::Index>(K, 2 * dim));
    for (Eigen::Index m = 0; m < K; ++m)
      for (Eigen::Index t = 0; m + t < K; ++t) ew[m] += problem.b[m + t] * problem.w[t];
    Eigen::MatrixXd M2 = hankel(ew, 2 * dim).matrix;
    const double s2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M2, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .cwiseAbs()
                          .maxCoeff();
    res.truncation_drift = std::abs(s2 - res.sigma_max) / std::max(s2, 1e-300);
    if (res.truncation_drift > options.stability_tolerance) {
      throw Error(ErrorKind::TruncationUnstable,
                  "sigma_max moves by " + num(res.truncation_drift) + " between S = " +
                      std::to_string(dim) + " and 2S");
    }
  }

  const double P = class_power(cls);
  if (options.try_stationary) {
    const int count = std::min<int>(options.candidates, dim);
    for (int c = 0; c < count; ++c) {
      Eigen::VectorXd phi = eig.eigenvectors().col(order[c]) * std::sqrt(P);
      if (phi[0] < 0.0) phi = -phi;
      if (!(phi[0] > 0.0) || !is_minimum_phase(phi)) continue;
      DensityGrid f(grid, power_spectrum(phi, grid));
      if (!in_class(f, cls)) continue;
      res.branch = Branch::Stationary;
      res.alpha = evals[order[c]];
      res.phi0 = phi;
      res.f0 = f;
      if (auto m = std::get_if<ClassDM>(&cls)) {
        res.denominator = Eigen::VectorXd::Zero(m->rho.size());
        res.denominator[0] = std::abs(res.alpha);
      }
      complete(res, problem, grid);
      return res;
    }
  }

  res.branch = Branch::FixedPoint;
  DensityGrid f = initial_density(cls, grid);
  if (std::holds_alternative<ClassD0>(cls)) {
    Eigen::VectorXd top = eig.eigenvectors().col(order[0]);
    Eigen::VectorXd q = power_spectrum(top, grid);
    f = DensityGrid(grid, q * (P / q.mean()));
  }
  const FactorOptions fopts = loose_factor(dim, grid);
  ClassMap mapped;
  bool converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd phi = pad(canonical_factorization(f, fopts).coeffs, dim);
    Eigen::VectorXd q = power_spectrum(problem.M * phi, grid);
    mapped = apply_class(cls, q, grid);
    res.iterations = it;
    res.fixed_point_residual = (mapped.f - f.values()).cwiseAbs().maxCoeff();
    if (!std::isfinite(res.fixed_point_residual)) break;
    if (res.fixed_point_residual <= options.tolerance * std::max(1.0, f.values().maxCoeff())) {
      converged = true;
      break;
    }
    f = DensityGrid(grid, (1.0 - options.damping) * f.values() + options.damping * mapped.f);
  }
  if (!converged) {
    const ErrorKind kind = std::holds_alternative<ClassD0>(cls) ? ErrorKind::NoValidStationaryPoint
                                                                : ErrorKind::FixedPointDiverged;
    throw Error(kind, "fixed point did not converge in " + std::to_string(options.max_iterations) +
                          " iterations (residual " + num(res.fixed_point_residual) + ")");
  }
  res.f0 = DensityGrid(grid, mapped.f);
  CanonicalFactor factor0 = canonical_factorization(res.f0, fopts);
  res.phi0 = pad(factor0.coeffs, dim);
  res.denominator = mapped.denominator;
  res.lower_clamped_fraction = mapped.lower;
  res.upper_clamped_fraction = mapped.upper;
  complete(res, problem, grid, factor0.boundary);
  if (res.denominator.size()) {
    Eigen::VectorXd q = power_spectrum(res.r0, grid);
    Eigen::VectorXd c2 = power_spectrum(res.denominator, grid);
    // least-squares fit of |r0|^2 = s f0 |C|^2
    const double scale = (q.array() * c2.array()).sum() / (res.f0.values().array() * c2.array().square()).sum();
    res.denominator *= std::sqrt(std::max(scale, 0.0));
  }
  return res;
}

namespace {

ExtremalProblem general_problem(const FunctionalCoefficients& a, IncrementSpec spec,
                                const MinimaxOptions& options) {
  return extremal_problem(a, spec, options.truncation);
}

}  // namespace

LeastFavorableResult lf_density_D0_finite(const Eigen::VectorXd& a_N, IncrementSpec spec, double P0,
                                          const FrequencyGrid& grid, int N, const MinimaxOptions& options) {
  return least_favorable(extremal_problem_finite(a_N, spec, N), ClassD0{P0}, grid, options);
}

LeastFavorableResult lf_density_D0_infinite(const FunctionalCoefficients& a, IncrementSpec spec,
                                            double P0, const FrequencyGrid& grid,
                                            const MinimaxOptions& options) {
  return least_favorable(extremal_problem_infinite(a, spec, options.truncation), ClassD0{P0}, grid,
                         options);
}

LeastFavorableResult lf_density_DM(const Eigen::VectorXd& a_N, IncrementSpec spec,
                                   const Eigen::VectorXd& rho, const FrequencyGrid& grid, int N,
                                   const MinimaxOptions& options) {
  return least_favorable(extremal_problem_finite(a_N, spec, N), ClassDM{rho}, grid, options);
}

LeastFavorableResult lf_density_Dvu(const FunctionalCoefficients& a, IncrementSpec spec,
                                    const DensityGrid& v, const DensityGrid& u, double P0,
                                    const MinimaxOptions& options) {
  return least_favorable(general_problem(a, spec, options), ClassDvu{v, u, P0}, v.grid(), options);
}

LeastFavorableResult lf_density_Deps(const FunctionalCoefficients& a, IncrementSpec spec,
                                     const DensityGrid& v, double eps, const MinimaxOptions& options) {
  return least_favorable(general_problem(a, spec, options), ClassDeps{v, eps}, v.grid(), options);
}

namespace {

// |r|^2 / f0 with 0/0 nodes filled from their neighbours.
Eigen::VectorXd mismatch_ratio(const Eigen::VectorXd& r, const DensityGrid& f0, double tolerance) {
  const FrequencyGrid& grid = f0.grid();
  Eigen::VectorXd q = power_spectrum(r, grid);
  const int G = grid.size();
  const double qmax = std::max(q.maxCoeff(), 1e-300);
  const double fmax = std::max(f0.values().maxCoeff(), 1e-300);
  Eigen::VectorXd ratio(G);
  std::vector<bool> defined(G, true);
  for (int j = 0; j < G; ++j) {
    if (f0[j] > 1e-300 * fmax) {
      ratio[j] = q[j] / f0[j];
    } else if (q[j] <= tolerance * qmax) {
      defined[j] = false;
      ratio[j] = 0.0;
    } else {
      throw Error(ErrorKind::DivergentIntegrand,
                  "f0 vanishes where |r|^2 = " + num(q[j]) + " at lambda = " + num(grid.node(j)));
    }
  }
  for (int j = 0; j < G; ++j) {
    if (defined[j]) continue;
    double sum = 0.0;
    int cnt = 0;
    for (int d = 1; d < G && cnt == 0; ++d) {
      for (int s : {j - d, j + d}) {
        const int k = ((s % G) + G) % G;
        if (defined[k]) sum += ratio[k], ++cnt;
      }
    }
    ratio[j] = cnt ? sum / cnt : 0.0;
  }
  return ratio;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// |random trig polynomial|^2 of degree <= 8, normalized to mean 1.
Eigen::VectorXd random_shape(std::mt19937_64& rng, const FrequencyGrid& grid) {
  const int deg = std::uniform_int_distribution<int>(0, 8)(rng);
  Eigen::VectorXd c(deg + 1);
  std::normal_distribution<double> nd;
  for (int k = 0; k <= deg; ++k) c[k] = nd(rng);
  Eigen::VectorXd s = power_spectrum(c, grid);
  return s / s.mean();
}

// Smooth function with values in [0, 1].
Eigen::VectorXd random_profile(std::mt19937_64& rng, const FrequencyGrid& grid) {
  Eigen::VectorXd s = random_shape(rng, grid);
  return s / s.maxCoeff();
}

}  // namespace

std::vector<DensityGrid> sample_class(const DensityClassSpec& cls, const FrequencyGrid& grid,
                                      const DensityGrid& f0, int count, std::uint64_t seed,
                                      std::vector<std::string>* kinds) {
  std::seed_seq seq{seed};
  std::mt19937_64 rng(seq);
  std::vector<DensityGrid> out;
  auto push = [&](Eigen::VectorXd f, const char* kind) {
    out.emplace_back(grid, std::move(f));
    if (kinds) kinds->push_back(kind);
  };
  const int G = grid.size();
  for (int i = 0; i < count; ++i) {
    if (auto c = std::get_if<ClassD0>(&cls)) {
      if (i == 0 && f0.power() > 0.0) {
        push(f0.values() * (c->P0 / f0.power()), "full_power");
        continue;
      }
      push(random_shape(rng, grid) * (uniform(rng, 0.5, 1.0) * c->P0), "trig_poly");
    } else if (auto c = std::get_if<ClassDM>(&cls)) {
      const int M = static_cast<int>(c->rho.size()) - 1;
      if (i % 2 == 0) {
        const double floor = f0.values().minCoeff();
        Eigen::VectorXd f = f0.values();
        const int terms = 3;
        Eigen::VectorXd add = Eigen::VectorXd::Zero(G);
        for (int t = 0; t < terms; ++t) {
          const int k = M + 1 + std::uniform_int_distribution<int>(0, 16)(rng);
          const double amp = uniform(rng, -1.0, 1.0) / terms;
          for (int j = 0; j < G; ++j) add[j] += amp * std::cos(k * grid.node(j));
        }
        f += std::max(floor, 0.0) * add;
        push(f.cwiseMax(0.0), "high_frequency");
      } else {
        const int extra = std::uniform_int_distribution<int>(1, 6)(rng);
        Eigen::VectorXd kap(extra);
        for (int k = 0; k < extra; ++k) kap[k] = uniform(rng, -0.6, 0.6);
        push(max_entropy_density(c->rho, grid, kap).values(), "max_entropy");
      }
    } else if (auto c = std::get_if<ClassDvu>(&cls)) {
      const Eigen::VectorXd& v = c->v.values();
      const Eigen::VectorXd& u = c->u.values();
      const double room = c->P0 - v.mean();
      Eigen::VectorXd span(G);
      for (int j = 0; j < G; ++j) span[j] = std::isfinite(u[j]) ? u[j] - v[j] : 10.0 * c->P0;
      Eigen::VectorXd s = random_profile(rng, grid).cwiseProduct(span);
      double t = s.mean() > 0.0 ? std::min(1.0, room / s.mean()) : 0.0;
      t *= uniform(rng, 0.5, 1.0);
      push(v + t * s, "bounded");
    } else {
      const auto& e = std::get<ClassDeps>(cls);
      const Eigen::VectorXd& v = e.v.values();
      const double share = uniform(rng, 0.0, 1.0);
      const double total = e.eps * uniform(rng, 0.5, 1.0);
      Eigen::VectorXd bump = random_shape(rng, grid);
      Eigen::VectorXd dip = random_shape(rng, grid);
      push(v + share * total * bump - v.cwiseMin((1.0 - share) * total * dip), "contaminated");
    }
  }
  return out;
}

double mse_mismatch(const Eigen::VectorXd& r, const DensityGrid& f0, const DensityGrid& f) {
  Eigen::VectorXd ratio = mismatch_ratio(r, f0, 1e-10);
  return ratio.cwiseProduct(f.values()).mean();
}

SaddleReport saddle_check(const LeastFavorableResult& result, const DensityClassSpec& cls, int probes,
                          std::uint64_t seed, double tolerance) {
  const FrequencyGrid& grid = result.f0.grid();
  SaddleReport rep;
  rep.tolerance = tolerance;
  Eigen::VectorXd ratio = mismatch_ratio(result.r0, result.f0, 1e-10);
  rep.base = ratio.cwiseProduct(result.f0.values()).mean();
  const double tol = tolerance * std::max(1.0, rep.base);

  rep.probes.push_back({0, "f0", 0.0});
  std::vector<std::string> kinds;
  std::vector<DensityGrid> fs = sample_class(cls, grid, result.f0, std::max(0, probes - 1), seed, &kinds);
  rep.max_right_violation = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double d = ratio.cwiseProduct(fs[i].values()).mean() - rep.base;
    rep.probes.push_back({static_cast<int>(i) + 1, kinds[i], d});
    rep.max_right_violation = std::max(rep.max_right_violation, d);
  }
  rep.right_ok = rep.max_right_violation <= tol;

  // Delta(h; f0) = mean |B - h|^2 g f0; admissible h move along e^{-i l k}, k >= 1
  Eigen::VectorXcd E = grid.evaluate(result.h0.b).conjugate() - result.h0.samples;
  Eigen::VectorXd f0 = result.f0.values().cwiseProduct(increment_kernel(grid, result.spec));
  std::seed_seq seq{seed, std::uint64_t{0x5ad}};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> nd;
  rep.left_base = E.cwiseAbs2().cwiseProduct(f0).mean();
  rep.min_left_gap = 0.0;
  const int left = std::max(1, probes);
  for (int p = 0; p < left; ++p) {
    const int J = std::uniform_int_distribution<int>(1, 8)(rng);
    const double size = std::pow(10.0, uniform(rng, -3.0, 0.0)) * std::sqrt(std::max(rep.base, 1e-300));
    Eigen::VectorXcd gam(J + 1);
    gam[0] = 0.0;
    for (int k = 1; k <= J; ++k) gam[k] = cplx(nd(rng), nd(rng)) * size;
    Eigen::VectorXcd G = grid.evaluate(gam);
    const double val = (E - G).cwiseAbs2().cwiseProduct(f0).mean();
    rep.min_left_gap = p == 0 ? val - rep.base : std::min(rep.min_left_gap, val - rep.base);
  }
  rep.left_ok = rep.min_left_gap >= -tol && std::abs(rep.left_base - rep.base) <= tol;
  return rep;
}

TwoTermSolution closed_form_two_term(double a, double b, IncrementSpec spec, double P0, double w0, double w1) {
  TwoTermSolution s;
  s.x = (a + (spec.mu == 1 ? b : 0.0)) * w0 + b * w1;
  s.y = b * w0;
  if (s.x == 0.0 || s.y == 0.0) {
    throw Error(ErrorKind::DegenerateXY, "x = " + num(s.x) + ", y = " + num(s.y));
  }
  const double r = std::sqrt(s.x * s.x + 4.0 * s.y * s.y);
  const double sgn = (s.x * s.y > 0.0) ? 1.0 : -1.0;
  s.phi0 = std::sqrt(P0 * (r + std::abs(s.x)) / (2.0 * r));
  s.phi1 = sgn * std::sqrt(P0 * (r - std::abs(s.x)) / (2.0 * r));
  s.alpha = 0.5 * (s.x + std::copysign(r, s.x));
  s.parameter = (s.x + std::copysign(r, s.y)) / (2.0 * s.y);
  return s;
}

Eigen::VectorXd cosine_moments(const DensityGrid& f, int M) {
  const FrequencyGrid& grid = f.grid();
  Eigen::VectorXd out(M + 1);
  for (int m = 0; m <= M; ++m) {
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) acc += f[j] * std::cos(m * grid.node(j));
    out[m] = acc / grid.size();
  }
  return out;
}

DensityGrid max_entropy_density(const Eigen::VectorXd& rho, const FrequencyGrid& grid,
                                const Eigen::VectorXd& extra_reflections) {
  Levinson lev = levinson(rho);
  for (Eigen::Index k = 0; k < extra_reflections.size(); ++k) {
    if (!(std::abs(extra_reflections[k]) < 1.0)) {
      throw Error(ErrorKind::DomainError, "reflection coefficients must lie in (-1, 1)");
    }
    extend(lev, extra_reflections[k]);
  }
  Eigen::VectorXd poly(lev.a.size() + 1);
  poly[0] = 1.0;
  poly.tail(lev.a.size()) = lev.a;
  Eigen::VectorXd den = power_spectrum(poly, grid);
  return DensityGrid(grid, lev.error * den.cwiseInverse());
}

}  // namespace increx
