#include "increx/extrapolation.hpp"

#include "increx/error.hpp"
#include "increx/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace increx {

namespace {

Eigen::VectorXd padded(const Eigen::VectorXd& x, Eigen::Index size) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
  Eigen::Index m = std::min(size, x.size());
  out.head(m) = x.head(m);
  return out;
}

double tail_estimate(const Eigen::VectorXd& w) {
  const Eigen::Index K = w.size();
  if (K < 64) return 0.0;
  double older = w.segment(K - 64, 32).squaredNorm();
  double recent = w.tail(32).squaredNorm();
  double floor = 1e-14 * w.cwiseAbs().maxCoeff();
  if (recent <= 32.0 * floor * floor) return 0.0;
  if (older == 0.0 || recent >= older) return std::numeric_limits<double>::infinity();
  double rho = recent / older;
  return recent * rho / (1.0 - rho);
}

FactorOptions widened(FactorOptions factor, Eigen::Index length, const FrequencyGrid& grid) {
  factor.truncation = std::max<int>(factor.truncation, static_cast<int>(length) - 1);
  if (2 * factor.truncation >= grid.size()) {
    throw Error(ErrorKind::DomainError, "functional support too long for the frequency grid");
  }
  return factor;
}

}  // namespace

Eigen::VectorXd characteristic_coeffs(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu) {
  const Eigen::Index S = b.size();
  return hankel(b, S).matrix * padded(phi_mu, S);
}

SpectralCharacteristic characteristic_B(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu,
                                        const FrequencyGrid& grid, IncrementSpec spec,
                                        FunctionalKind kind, std::string provenance,
                                        const Eigen::VectorXcd& phi_boundary) {
  SpectralCharacteristic h{grid, {}, b, characteristic_coeffs(b, phi_mu), spec, kind,
                           std::move(provenance)};
  Eigen::VectorXcd big_phi = phi_boundary.size() == grid.size() ? phi_boundary : grid.evaluate(phi_mu);
  double scale = big_phi.cwiseAbs().maxCoeff();
  if (!(big_phi.cwiseAbs().minCoeff() >= 1e-14 * scale)) {
    throw Error(ErrorKind::SingularFactor, "Phi_mu(e^{-i lambda}) vanishes on the grid");
  }
  Eigen::VectorXcd big_b = grid.evaluate(b).conjugate();
  Eigen::VectorXcd big_r = grid.evaluate(h.r).conjugate();
  h.samples = big_b - big_r.cwiseQuotient(big_phi);
  return h;
}

double mse_B(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu) {
  return characteristic_coeffs(b, phi_mu).squaredNorm();
}

double mse_quadrature(const SpectralCharacteristic& h) {
  return h.grid.evaluate(h.r).cwiseAbs2().mean();
}

Eigen::VectorXd filter_weights(const SpectralCharacteristic& h, const Eigen::VectorXd& phi_mu, int K,
                               double tolerance, double* residual) {
  const IncrementSpec spec = h.spec;
  if (K < 1 || 2 * K >= h.grid.size()) {
    throw Error(ErrorKind::DomainError, "horizon must lie in 1..G/2 - 1");
  }
  const Eigen::Index R = h.r.size();
  Eigen::VectorXd chi = convolve(difference_polynomial(spec.n, spec.mu),
                                 series_inverse(phi_mu, K + R), K + R);
  Eigen::VectorXd w(K);
  for (int k = 1; k <= K; ++k) w[k - 1] = -h.r.dot(chi.segment(k, R));

  Eigen::VectorXd v = v_from_b(h.b, spec);
  if (h.kind == FunctionalKind::Increments) {
    for (Eigen::Index i = 0; i < v.size() && i < K; ++i) w[i] += v[i];
  }

  // Fourier inversion of h (1 - e^{-i mu l})^n on the grid as an independent route
  const FrequencyGrid& grid = h.grid;
  Eigen::VectorXcd diff = grid.evaluate(difference_polynomial(spec.n, spec.mu));
  Eigen::VectorXcd t = h.samples;
  if (h.kind == FunctionalKind::Values) t -= grid.evaluate(h.b).conjugate();
  t = t.cwiseProduct(diff);
  Eigen::VectorXd inverted = grid.coefficients(t, 1, K).real();
  double err = (inverted - w).cwiseAbs().maxCoeff() / std::max(1.0, w.cwiseAbs().maxCoeff());
  if (residual) *residual = err;
  if (err > tolerance) {
    throw Error(ErrorKind::ToleranceNotMet,
                "filter weights disagree with Fourier inversion of h by " + num(err));
  }
  return w;
}

Eigen::VectorXcd orthogonality_defects(const SpectralCharacteristic& h, const DensityGrid& f,
                                       int kmin, int kmax) {
  const FrequencyGrid& grid = h.grid;
  Eigen::VectorXd gf = increment_kernel(grid, h.spec).cwiseProduct(f.values());
  Eigen::VectorXcd x = (grid.evaluate(h.b).conjugate() - h.samples).cwiseProduct(gf.cast<cplx>());
  // e^{-i l k} for k in [kmin, kmax] is the coefficient at -k
  Eigen::VectorXcd c = grid.coefficients(x, -kmax, -kmin);
  return c.reverse();
}

EstimateResult estimate_with_factor(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu,
                                    const FrequencyGrid& grid, IncrementSpec spec,
                                    FunctionalKind kind, const std::string& provenance,
                                    const ExtrapolationOptions& options,
                                    const Eigen::VectorXcd& phi_boundary) {
  EstimateResult est;
  est.characteristic = characteristic_B(b, phi_mu, grid, spec, kind, provenance, phi_boundary);
  est.phi_mu = phi_mu;
  est.mse = est.characteristic.r.squaredNorm();
  est.mse_quadrature = mse_quadrature(est.characteristic);
  est.past_weights = filter_weights(est.characteristic, phi_mu, options.horizon, options.tolerance,
                                    &est.inversion_residual);
  est.boundary_weights = kind == FunctionalKind::Values ? Eigen::VectorXd(-v_from_b(b, spec))
                                                        : Eigen::VectorXd::Zero(spec.n * spec.mu);
  est.tail_energy = tail_estimate(est.past_weights);
  est.tail_warning = est.tail_energy > 1e-10;
  return est;
}

EstimateResult predict_increment(int m, IncrementSpec spec, const Eigen::VectorXd& phi_mu,
                                 const FrequencyGrid& grid, const ExtrapolationOptions& options) {
  if (m < 0) throw Error(ErrorKind::DomainError, "prediction lead m must be >= 0");
  Eigen::VectorXd b = Eigen::VectorXd::Unit(m + 1, m);
  return estimate_with_factor(b, phi_mu, grid, spec, FunctionalKind::Increments,
                              "increment_prediction", options);
}

EstimateResult predict_value(int m, IncrementSpec spec, const Eigen::VectorXd& phi_mu,
                             const FrequencyGrid& grid, const ExtrapolationOptions& options) {
  if (m < 0 || m >= spec.mu) {
    throw Error(ErrorKind::DomainError, "value prediction needs mu > m >= 0");
  }
  // a = e_m gives b = D e_m = e_m since d(j) = 0 for 0 < j < mu
  Eigen::VectorXd b = Eigen::VectorXd::Unit(m + 1, m);
  return estimate_with_factor(b, phi_mu, grid, spec, FunctionalKind::Values, "value_prediction",
                              options);
}

EstimateResult estimate_functional_A(const FunctionalCoefficients& a, const DensityGrid& f,
                                     IncrementSpec spec, const ExtrapolationOptions& options) {
  Eigen::VectorXd b = b_from_a(a, spec);
  CanonicalFactor phi_mu =
      increment_density_factor(f, spec, widened(options.factor, b.size(), f.grid()));
  return estimate_with_factor(b, phi_mu.coeffs, f.grid(), spec, FunctionalKind::Values,
                              "functional_A", options, phi_mu.boundary);
}

EstimateResult estimate_functional_AN(const Eigen::VectorXd& a_N, const DensityGrid& f,
                                      IncrementSpec spec, int N,
                                      const ExtrapolationOptions& options) {
  if (N < 0 || a_N.size() != N + 1) {
    throw Error(ErrorKind::DomainError, "a_N must hold N + 1 coefficients");
  }
  CanonicalFactor phi_mu = increment_density_factor(f, spec, widened(options.factor, N + 1, f.grid()));
  const Eigen::MatrixXd D = build_D_N(spec, N).matrix;
  Eigen::VectorXd b = D * a_N;
  Eigen::VectorXd phi_n = phi_mu.coeffs.head(N + 1);
  Eigen::VectorXd r = D * (build_A_N(a_N, N).matrix * phi_n);

  EstimateResult est = estimate_with_factor(b, phi_mu.coeffs, f.grid(), spec, FunctionalKind::Values,
                                            "functional_AN", options, phi_mu.boundary);
  // the finite matrices give the same r; keep theirs and the finite boundary weights
  est.characteristic.r = r;
  est.mse = r.squaredNorm();
  est.boundary_weights = -v_N_from_b(b, spec, N);
  return est;
}

}  // namespace increx
