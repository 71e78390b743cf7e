#include "increx/error.hpp"
#include "increx/montecarlo.hpp"
#include "increx/series.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <unsupported/Eigen/FFT>

#include <cstdlib>

using namespace increx;

namespace {

double lag_covariance(const Eigen::MatrixXd& x, int lag, double* se) {
  Eigen::VectorXd prod(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    prod[r] = x.row(r).head(x.cols() - lag).dot(x.row(r).tail(x.cols() - lag)) / (x.cols() - lag);
  }
  const double m = prod.mean();
  *se = std::sqrt((prod.array() - m).square().sum() / (prod.size() - 1) / prod.size());
  return m;
}

}  // namespace

TEST_CASE("simulated increments have the moving-average covariances") {
  SimulationConfig cfg{{1, 1}, Eigen::VectorXd::Ones(1), 256, -1, 400, 3};
  double se = 0.0;
  auto white = simulate_increments(cfg);
  double c1 = lag_covariance(white, 1, &se);
  CHECK(std::abs(c1) <= 3 * se);
  CHECK(std::abs(white.mean()) <= 3.0 / std::sqrt(double(white.size())));

  cfg.phi_mu = Eigen::Vector2d(1.0, 0.5);
  auto ma = simulate_increments(cfg);
  for (int lag : {0, 1, 2}) {
    const double truth[] = {1.25, 0.5, 0.0};
    double c = lag_covariance(ma, lag, &se);
    CHECK(std::abs(c - truth[lag]) <= 3 * se);
  }
}

TEST_CASE("averaged periodogram follows the factor") {
  Eigen::Vector3d phi(1.0, -0.6, 0.3);
  SimulationConfig cfg{{1, 1}, phi, 4096, -1, 200, 17};
  auto x = simulate_increments(cfg);
  Eigen::FFT<double> fft;
  const int T = cfg.length;
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(T);
  for (int r = 0; r < cfg.trials; ++r) {
    Eigen::VectorXd row = x.row(r);
    Eigen::VectorXcd spec;
    fft.fwd(spec, row);
    avg += spec.cwiseAbs2() / T;
  }
  avg /= cfg.trials;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < T; ++k) {
    const double truth = std::norm(oracle::poly(phi, 2 * oracle::pi * k / T));
    num += std::abs(avg[k] - truth);
    den += truth;
  }
  CHECK(num / den <= 0.10);
}

TEST_CASE("integration inverts the difference operator") {
  SimulationConfig cfg{{1, 1}, Eigen::Vector2d(1.0, 0.3), 50, -1, 3, 5};
  auto x = simulate_increments(cfg);
  auto xi = integrate_to_sequence(x, {1, 1});
  for (int t = 0; t < 50; ++t) CHECK(xi(1, t + 1) == doctest::Approx(x.row(1).head(t + 1).sum()).epsilon(1e-12));

  for (IncrementSpec spec : {IncrementSpec(2, 3), IncrementSpec(3, 1), IncrementSpec(1, 4)}) {
    Eigen::MatrixXd init = Eigen::MatrixXd::Random(3, spec.n * spec.mu);
    auto values = integrate_to_sequence(x, spec, init);
    CHECK((difference_paths(values, spec) - x).cwiseAbs().maxCoeff() <= 1e-9 * values.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("increments at step k mu aggregate increments at step mu") {
  // (1 - z^{k mu})^n = (1 - z^mu)^n (1 + z^mu + ... + z^{(k-1) mu})^n
  for (IncrementSpec spec : {IncrementSpec(1, 1), IncrementSpec(2, 2), IncrementSpec(2, 1)}) {
    const int k = 3;
    SimulationConfig cfg{spec, Eigen::Vector2d(1.0, -0.4), 120, -1, 4, 9};
    auto values = integrate_to_sequence(simulate_increments(cfg), spec);
    auto step = difference_paths(values, spec);
    auto wide = difference_paths(values, {spec.n, k * spec.mu});
    Eigen::VectorXd A = Eigen::VectorXd::Ones(1);
    for (int i = 0; i < spec.n; ++i) A = convolve(A, Eigen::VectorXd::Ones(k));
    const int shift = (k - 1) * spec.n * spec.mu;
    Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(wide.rows(), wide.cols());
    for (Eigen::Index l = 0; l < A.size(); ++l) agg += A[l] * step.middleCols(shift - l * spec.mu, wide.cols());
    CHECK((agg - wide).cwiseAbs().maxCoeff() <= 1e-9 * (1 + wide.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("integrated MA(1) empirical mean square error") {
  FrequencyGrid grid(4096);
  auto f = DensityGrid::sample(grid, [](double x) { return oracle::ima1_density(x, 0.5); });
  auto est = estimate_functional_AN(Eigen::Vector2d(1, 1), f, {1, 1}, 1);
  SimulationConfig cfg{{1, 1}, est.phi_mu, 200, -1, 2000, 2024};
  auto values = simulate_sequence(cfg);
  TargetFunctional target{FunctionalKind::Values, Eigen::Vector2d(1, 1)};
  auto rep = empirical_mse(est, values, target);
  CHECK(rep.analytic_mse == doctest::Approx(7.25).epsilon(1e-8));
  CHECK(std::abs(rep.z_score) <= 3.0);
  CHECK(rep.trials == 2000);

  auto detuned = empirical_mse(est, values, target, 1.1);
  CHECK(detuned.z_score >= 2.0);

  // the error does not depend on the initial values
  Eigen::MatrixXd init = Eigen::MatrixXd::Constant(cfg.trials, 1, 5.0);
  auto shifted = simulate_sequence(cfg, init);
  auto again = empirical_mse(est, shifted, target);
  CHECK(again.empirical_mse == doctest::Approx(rep.empirical_mse).epsilon(1e-9));

  CHECK_THROWS_AS(empirical_mse(est, values.rightCols(10), target), Error);
}

TEST_CASE("increment prediction empirical mean square error") {
  FrequencyGrid grid(4096);
  IncrementSpec spec(1, 2);
  Eigen::VectorXd phi = convolve(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 0.4));
  for (int m = 0; m <= 2; ++m) {
    auto est = predict_increment(m, spec, phi, grid, {.horizon = 128});
    SimulationConfig cfg{spec, phi, 160, -1, 2000, 77u + m};
    auto values = simulate_sequence(cfg);
    TargetFunctional target{FunctionalKind::Increments, Eigen::VectorXd::Unit(m + 1, m)};
    auto rep = empirical_mse(est, values, target);
    CAPTURE(m);
    CHECK(std::abs(rep.z_score) <= 3.0);
    Eigen::MatrixXd init = Eigen::MatrixXd::Random(cfg.trials, spec.n);
    auto again = empirical_mse(est, simulate_sequence(cfg, init), target);
    CHECK(again.empirical_mse == doctest::Approx(rep.empirical_mse).epsilon(1e-9));
    if (m == 0) CHECK(rep.analytic_mse == doctest::Approx(phi[0] * phi[0]));
  }
}

TEST_CASE("value paths have the requested step-mu increments") {
  IncrementSpec spec(2, 3);
  Eigen::VectorXd p = convolve(Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, 1, 1));
  Eigen::VectorXd phi = convolve(p, Eigen::Vector2d(1.0, -0.5));
  SimulationConfig cfg{spec, phi, 300, -1, 500, 8};
  auto x = difference_paths(simulate_sequence(cfg), spec);
  double se = 0.0;
  for (int lag = 0; lag < 5; ++lag) {
    double truth = 0.0;
    for (int k = 0; k + lag < phi.size(); ++k) truth += phi[k] * phi[k + lag];
    double c = lag_covariance(x.rightCols(200), lag, &se);
    CAPTURE(lag);
    CHECK(std::abs(c - truth) <= 3.5 * se);
  }
}

TEST_CASE("simulation is reproducible and thread-count independent") {
  SimulationConfig cfg{{2, 1}, Eigen::Vector3d(1.0, 0.2, -0.1), 64, -1, 37, 99};
  auto a = simulate_increments(cfg);
  setenv("INCREX_MAX_THREADS", "1", 1);
  CHECK(worker_threads(100) == 1);
  auto b = simulate_increments(cfg);
  unsetenv("INCREX_MAX_THREADS");
  CHECK((a.array() == b.array()).all());
  cfg.seed = 100;
  CHECK((simulate_increments(cfg).array() != a.array()).any());
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v.data(), 1000) == doctest::Approx(100.0).epsilon(1e-14));
}
