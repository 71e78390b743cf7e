#include "increx/spectral.hpp"

#include "increx/error.hpp"
#include "increx/series.hpp"
#include "increx/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace increx {

namespace {

constexpr double pi = std::numbers::pi;

struct LogCepstrum {
  Eigen::VectorXd c;  // c_0..c_{G/2-1} of ln f
  double floor_value = 0.0;
  int floored = 0;
};

LogCepstrum log_cepstrum(const DensityGrid& f, double floor_rel, int kmax) {
  const Eigen::VectorXd& v = f.values();
  const int G = f.size();
  double top = v.maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw Error(ErrorKind::NotFactorizable, "density must be positive and finite somewhere");
  }
  LogCepstrum out;
  out.floor_value = floor_rel * top;
  Eigen::VectorXd logs(G);
  for (int j = 0; j < G; ++j) {
    if (v[j] <= out.floor_value) ++out.floored;
    logs[j] = std::log(std::max(v[j], out.floor_value));
  }
  if (out.floored > G / 100) {
    throw Error(ErrorKind::NotFactorizable,
                "density vanishes on " + std::to_string(out.floored) + " of " + std::to_string(G) +
                    " grid nodes");
  }
  out.c = f.grid().coefficients(logs, 0, kmax).real();
  return out;
}

double cepstral_tail(const Eigen::VectorXd& c) {
  const Eigen::Index G = 2 * c.size();
  return c.segment(G / 4, G / 4).cwiseAbs().maxCoeff();
}

Eigen::VectorXd exp_causal(Eigen::VectorXd c, int length) {
  c[0] *= 0.5;
  return series_exp(c.head(std::min<Eigen::Index>(length, c.size())), length);
}

// exp of the causal part of a log cepstrum, evaluated on the grid.
Eigen::VectorXcd boundary_from_cepstrum(Eigen::VectorXd c, const FrequencyGrid& grid) {
  c[0] *= 0.5;
  return grid.evaluate(c).array().exp();
}

void check_truncation(int L, const FrequencyGrid& grid) {
  if (L < 0 || 2 * L >= grid.size()) {
    throw Error(ErrorKind::DomainError,
                "truncation L=" + std::to_string(L) + " needs L < G/2 for G=" +
                    std::to_string(grid.size()));
  }
}

Eigen::VectorXd sum_poly_power(int n, int mu) {
  Eigen::VectorXd base = Eigen::VectorXd::Ones(mu);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(1);
  for (int i = 0; i < n; ++i) p = convolve(p, base);
  return p;
}

}  // namespace

double increment_kernel(double lambda, IncrementSpec spec) {
  if (lambda == 0.0) return std::pow(static_cast<double>(spec.mu), 2 * spec.n);
  double r = std::sin(spec.mu * lambda / 2.0) / (lambda / 2.0);
  return std::pow(r * r, spec.n);
}

Eigen::VectorXd increment_kernel(const FrequencyGrid& grid, IncrementSpec spec) {
  Eigen::VectorXd g(grid.size());
  for (int j = 0; j < grid.size(); ++j) g[j] = increment_kernel(grid.node(j), spec);
  return g;
}

double smooth_kernel(double lambda, int n) {
  if (lambda == 0.0) return 1.0;
  double r = std::sin(lambda / 2.0) / (lambda / 2.0);
  return std::pow(r * r, n);
}

double distance_to_kernel_zero(double lambda, IncrementSpec spec) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; 2 * k <= spec.mu; ++k) {
    double z = 2.0 * pi * k / spec.mu;
    best = std::min({best, std::abs(lambda - z), std::abs(lambda + z),
                     2.0 * pi - std::abs(lambda - z), 2.0 * pi - std::abs(lambda + z)});
  }
  return best;
}

Eigen::VectorXd outer_factor_coeffs(IncrementSpec spec, int length) {
  Eigen::VectorXd q = series_exp(Eigen::VectorXd(spec.n * sinc_outer_cepstrum(length)), length);
  return convolve(sum_poly_power(spec.n, spec.mu), q, length);
}

OuterFactorW outer_factor_w(IncrementSpec spec, const FrequencyGrid& grid, int L, double tolerance) {
  check_truncation(L, grid);
  OuterFactorW w;
  w.spec = spec;
  w.grid_size = grid.size();
  w.coeffs = outer_factor_coeffs(spec, L + 1);

  const int G = grid.size();
  Eigen::VectorXd g = increment_kernel(grid, spec);
  Eigen::VectorXd log_s(G);
  for (int j = 0; j < G; ++j) log_s[j] = spec.n * std::log(smooth_kernel(grid.node(j), 1));
  Eigen::VectorXd c = grid.coefficients(log_s, 0, G / 2 - 1).real();
  w.boundary = grid.evaluate(sum_poly_power(spec.n, spec.mu)).cwiseProduct(boundary_from_cepstrum(c, grid));

  double err = 0.0;
  for (int j = 0; j < G; ++j) {
    if (distance_to_kernel_zero(grid.node(j), spec) < grid.spacing()) continue;
    err = std::max(err, std::abs(std::norm(w.boundary[j]) - g[j]) / g[j]);
  }
  w.reconstruction_error = err;
  if (err > tolerance) {
    throw Error(ErrorKind::ToleranceNotMet,
                "outer factor reproduces g only to " + num(err));
  }
  return w;
}

CanonicalFactor canonical_factorization(const DensityGrid& f, const FactorOptions& options) {
  const int L = options.truncation;
  check_truncation(L, f.grid());
  LogCepstrum lc = log_cepstrum(f, options.floor, f.size() / 2 - 1);
  CanonicalFactor phi;
  phi.coeffs = exp_causal(lc.c, L + 1);
  phi.boundary = boundary_from_cepstrum(lc.c, f.grid());
  phi.floor_value = lc.floor_value;
  phi.floored_nodes = lc.floored;
  phi.grid_size = f.size();

  Eigen::VectorXd rec = power_spectrum(phi.coeffs, f.grid());
  phi.reconstruction_error = (rec - f.values()).cwiseAbs().maxCoeff() / f.values().maxCoeff();
  if (options.enforce && phi.reconstruction_error > options.tolerance) {
    throw Error(ErrorKind::ToleranceNotMet,
                "factor reproduces the density only to " + num(phi.reconstruction_error));
  }
  return phi;
}

CanonicalFactor canonical_factorization(const std::function<double(double)>& f,
                                        const FactorOptions& options, int start, int max) {
  for (int G = start;; G *= 2) {
    try {
      return canonical_factorization(DensityGrid::sample(FrequencyGrid(G), f), options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ToleranceNotMet || 2 * G > max) throw;
    }
  }
}

CanonicalFactor increment_density_factor(const DensityGrid& f, IncrementSpec spec,
                                         const FactorOptions& options) {
  const FrequencyGrid& grid = f.grid();
  const int L = options.truncation;
  const int G = grid.size();
  check_truncation(L, grid);

  Eigen::VectorXd s(G);
  for (int j = 0; j < G; ++j) s[j] = smooth_kernel(grid.node(j), spec.n);
  Eigen::VectorXd g = increment_kernel(grid, spec);
  Eigen::VectorXd target = g.cwiseProduct(f.values());

  // Three exact identities for the factor of g f; use the one whose log-spectrum is smoothest.
  struct Route {
    const char* name;
    DensityGrid density;
    Eigen::VectorXd prefix;
  };
  std::vector<Route> routes = {
      {"direct", DensityGrid(grid, target), Eigen::VectorXd::Ones(1)},
      {"difference", DensityGrid(grid, s.cwiseProduct(f.values())), sum_poly_power(spec.n, spec.mu)},
      {"outer", f, outer_factor_coeffs(spec, L + 1)},
  };
  const Route* best = nullptr;
  LogCepstrum best_lc;
  double best_tail = std::numeric_limits<double>::infinity();
  std::string failure;
  for (const Route& route : routes) {
    try {
      LogCepstrum lc = log_cepstrum(route.density, options.floor, G / 2 - 1);
      double tail = cepstral_tail(lc.c);
      if (tail < best_tail) {
        best = &route;
        best_lc = std::move(lc);
        best_tail = tail;
      }
    } catch (const Error& e) {
      failure = e.what();
    }
  }
  if (!best) throw Error(ErrorKind::NotFactorizable, failure);

  CanonicalFactor phi;
  phi.grid_size = G;
  phi.route = best->name;
  phi.coeffs = convolve(best->prefix, exp_causal(best_lc.c, L + 1), L + 1);
  phi.floor_value = best_lc.floor_value;
  phi.floored_nodes = best_lc.floored;

  Eigen::VectorXcd prefix = best->prefix.size() == 1 ? Eigen::VectorXcd::Ones(G)
                          : phi.route == "outer"     ? outer_factor_w(spec, grid, L).boundary
                                                     : grid.evaluate(best->prefix);
  phi.boundary = prefix.cwiseProduct(boundary_from_cepstrum(best_lc.c, grid));

  // the prefix is exact, so check the factor of the route's own density
  const Eigen::VectorXd& dens = best->density.values();
  Eigen::VectorXd rec = power_spectrum(exp_causal(best_lc.c, L + 1), grid);
  double top = dens.maxCoeff(), err = 0.0;
  for (int j = 0; j < G; ++j) {
    if (distance_to_kernel_zero(grid.node(j), spec) < grid.spacing()) continue;
    err = std::max(err, std::abs(rec[j] - dens[j]) / top);
  }
  phi.reconstruction_error = err;
  if (options.enforce && err > options.tolerance) {
    throw Error(ErrorKind::ToleranceNotMet,
                "increment factor reproduces g f only to " + num(err));
  }
  return phi;
}

Eigen::VectorXd power_spectrum(const Eigen::VectorXd& phi, const FrequencyGrid& grid) {
  return grid.evaluate(phi).cwiseAbs2();
}

FactorCheck verify_factorization(const Eigen::VectorXd& phi, const DensityGrid& f) {
  FactorCheck check;
  Eigen::VectorXd diff = (power_spectrum(phi, f.grid()) - f.values()).cwiseAbs();
  check.max_abs_error = diff.maxCoeff();
  double top = f.values().maxCoeff();
  check.max_rel_error = top > 0.0 ? check.max_abs_error / top : check.max_abs_error;
  check.min_phase = is_minimum_phase(phi);
  return check;
}

bool is_minimum_phase(const Eigen::VectorXd& phi) {
  Eigen::Index deg = phi.size() - 1;
  while (deg > 0 && phi[deg] == 0.0) --deg;
  if (phi.size() == 0 || phi[0] == 0.0) return false;
  if (deg == 0) return true;
  int M = 4096;
  while (M < 16 * (deg + 1)) M *= 2;
  Eigen::VectorXcd vals = FrequencyGrid(M).evaluate(Eigen::VectorXd(phi.head(deg + 1)));
  double scale = phi.head(deg + 1).cwiseAbs().sum();
  if (vals.cwiseAbs().minCoeff() < 1e-13 * scale) return false;
  double turn = 0.0;
  for (int j = 0; j < M; ++j) turn += std::arg(vals[(j + 1) % M] / vals[j]);
  return std::abs(turn) < pi;
}

}  // namespace increx
