#include "increx/montecarlo.hpp"

#include "increx/error.hpp"
#include "increx/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace increx {

namespace {

template <typename Fn>
void parallel_rows(int rows, Fn&& fn) {
  const int workers = worker_threads(rows);
  if (workers <= 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int r = w; r < rows; r += workers) fn(r);
    });
  }
  for (auto& t : pool) t.join();
}

Eigen::VectorXd trimmed(const Eigen::VectorXd& phi) {
  const double floor = 1e-14 * phi.cwiseAbs().maxCoeff();
  Eigen::Index n = phi.size();
  while (n > 1 && std::abs(phi[n - 1]) <= floor) --n;
  return phi.head(n);
}

}  // namespace

int worker_threads(int jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("INCREX_MAX_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, std::min(n, jobs));
}

double pairwise_sum(const double* x, Eigen::Index n) {
  if (n <= 8) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const Eigen::Index h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

Eigen::MatrixXd simulate_increments(const SimulationConfig& config) {
  if (config.trials < 1 || config.length < 1 || config.phi_mu.size() == 0) {
    throw Error(ErrorKind::DomainError, "simulation needs R >= 1, T >= 1 and a nonempty factor");
  }
  const Eigen::VectorXd phi = trimmed(config.phi_mu);
  const int L = static_cast<int>(phi.size());
  const int B = config.burn_in < 0 ? L : config.burn_in;
  const int T = config.length;
  const int total = T + B + L - 1;
  Eigen::MatrixXd out(config.trials, T);
  parallel_rows(config.trials, [&](int r) {
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Eigen::VectorXd eps(total);
    for (int i = 0; i < total; ++i) eps[i] = normal(rng);
    for (int t = 0; t < T; ++t) {
      // x(t) uses eps at offsets t + B + L - 1 - k
      const int base = t + B + L - 1;
      double acc = 0.0;
      for (int k = 0; k < L; ++k) acc += phi[k] * eps[base - k];
      out(r, t) = acc;
    }
  });
  return out;
}

Eigen::MatrixXd integrate_to_sequence(const Eigen::MatrixXd& increments, IncrementSpec spec,
                                      const Eigen::MatrixXd& initial) {
  const int lag = spec.n * spec.mu;
  const Eigen::Index R = increments.rows(), T = increments.cols();
  if (initial.size() && (initial.rows() != R || initial.cols() != lag)) {
    throw Error(ErrorKind::DomainError, "initial values must be R x (n mu)");
  }
  const Eigen::VectorXd d = difference_polynomial(spec.n, spec.mu);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(R, lag + T);
  if (initial.size()) xi.leftCols(lag) = initial;
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index t = 0; t < T; ++t) {
      double acc = increments(r, t);
      for (int l = 1; l <= spec.n; ++l) acc -= d[l * spec.mu] * xi(r, lag + t - l * spec.mu);
      xi(r, lag + t) = acc;
    }
  }
  return xi;
}

Eigen::MatrixXd simulate_sequence(const SimulationConfig& config, const Eigen::MatrixXd& initial) {
  const IncrementSpec spec = config.spec;
  Eigen::VectorXd p = Eigen::VectorXd::Ones(1);
  for (int i = 0; i < spec.n; ++i) p = convolve(p, Eigen::VectorXd::Ones(spec.mu));
  const Eigen::Index L = config.phi_mu.size();
  SimulationConfig unit = config;
  unit.spec = IncrementSpec(spec.n, 1);
  unit.phi_mu = convolve(series_inverse(p, L), config.phi_mu, L);
  if (config.burn_in < 0) unit.burn_in = static_cast<int>(trimmed(config.phi_mu).size());
  return integrate_to_sequence(simulate_increments(unit), unit.spec, initial);
}

Eigen::MatrixXd difference_paths(const Eigen::MatrixXd& values, IncrementSpec spec) {
  const int lag = spec.n * spec.mu;
  if (values.cols() <= lag) throw Error(ErrorKind::DomainError, "path shorter than n mu");
  const Eigen::VectorXd d = difference_polynomial(spec.n, spec.mu);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(values.rows(), values.cols() - lag);
  for (int l = 0; l <= spec.n; ++l) x += d[l * spec.mu] * values.middleCols(lag - l * spec.mu, x.cols());
  return x;
}

EmpiricalReport empirical_mse(const EstimateResult& estimate, const Eigen::MatrixXd& values,
                              const TargetFunctional& target, double weight_scale) {
  const IncrementSpec spec = estimate.characteristic.spec;
  const Eigen::VectorXd& c = estimate.past_weights;
  const double floor = 1e-14 * std::max(1.0, c.cwiseAbs().maxCoeff());
  int K = static_cast<int>(c.size());
  while (K > 0 && std::abs(c[K - 1]) <= floor) --K;

  const int span = static_cast<int>(target.coeffs.size());
  const int lag = target.kind == FunctionalKind::Increments ? spec.n * spec.mu : 0;
  const Eigen::Index t0 = values.cols() - span;  // column of time 0
  if (span == 0 || t0 - std::max(K, lag) < 0) {
    throw Error(ErrorKind::HorizonExceeded,
                "paths of " + std::to_string(values.cols()) + " values cannot hold " +
                    std::to_string(K) + " past weights and " + std::to_string(span) + " future terms");
  }
  if (estimate.tail_warning) {
    throw Error(ErrorKind::HorizonExceeded, "filter weights are not settled within the horizon");
  }
  const Eigen::VectorXd d = difference_polynomial(spec.n, spec.mu);
  const Eigen::Index R = values.rows();
  Eigen::VectorXd sq(R);
  for (Eigen::Index r = 0; r < R; ++r) {
    double est = 0.0;
    for (int k = 1; k <= K; ++k) est += weight_scale * c[k - 1] * values(r, t0 - k);
    double truth = 0.0;
    for (int k = 0; k < span; ++k) {
      double v = values(r, t0 + k);
      if (target.kind == FunctionalKind::Increments) {
        for (int l = 1; l <= spec.n; ++l) v += d[l * spec.mu] * values(r, t0 + k - l * spec.mu);
      }
      truth += target.coeffs[k] * v;
    }
    sq[r] = (truth - est) * (truth - est);
  }
  EmpiricalReport rep;
  rep.trials = static_cast<int>(R);
  rep.horizon = K;
  rep.analytic_mse = estimate.mse;
  rep.empirical_mse = pairwise_sum(sq.data(), R) / R;
  if (R >= 2) {
    Eigen::VectorXd dev = (sq.array() - rep.empirical_mse).square();
    const double var = pairwise_sum(dev.data(), R) / (R - 1);
    rep.standard_error = std::sqrt(var / R);
  }
  rep.z_score = rep.standard_error > 0.0 ? (rep.empirical_mse - rep.analytic_mse) / rep.standard_error : 0.0;
  return rep;
}

}  // namespace increx
