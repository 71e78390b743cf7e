#pragma once

#include "increx/extrapolation.hpp"
#include "increx/grid.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace increx {

struct SimulationConfig {
  IncrementSpec spec;
  Eigen::VectorXd phi_mu;  // moving-average weights of the increments
  int length = 1024;       // T
  int burn_in = -1;        // B; -1 uses the factor length
  int trials = 1;          // R
  std::uint64_t seed = 0;
};

// R x T increment paths x(t) = sum_k phi_mu(k) eps(t - k) with standard normal eps.
Eigen::MatrixXd simulate_increments(const SimulationConfig& config);

// Solves x = (1 - B^mu)^n xi for xi. Output has n mu + T columns: the initial values
// xi(-n mu..-1) followed by xi(0..T-1). An empty `initial` means zeros.
Eigen::MatrixXd integrate_to_sequence(const Eigen::MatrixXd& increments, IncrementSpec spec,
                                      const Eigen::MatrixXd& initial = {});

// Value paths whose step-mu increments have the moving-average weights phi_mu. Built from
// step-1 increments with weights phi_mu / (1 + z + ... + z^{mu-1})^n and integrated with
// step 1, so the paths carry no mu-periodic component. Output has n + T columns: n initial
// values (zeros when `initial` is empty) followed by xi(0..T-1).
Eigen::MatrixXd simulate_sequence(const SimulationConfig& config, const Eigen::MatrixXd& initial = {});

// (1 - B^mu)^n applied along each row; the first n mu columns are dropped.
Eigen::MatrixXd difference_paths(const Eigen::MatrixXd& values, IncrementSpec spec);

// Target functional on the last coefficients.size() columns of a value path.
struct TargetFunctional {
  FunctionalKind kind = FunctionalKind::Values;  // a(k) on values or b(k) on increments
  Eigen::VectorXd coeffs;
};

struct EmpiricalReport {
  double empirical_mse = 0.0;
  double standard_error = 0.0;
  double analytic_mse = 0.0;
  double z_score = 0.0;
  int trials = 0;
  int horizon = 0;  // past weights actually applied
};

// Applies the past weights of `estimate` (scaled by `weight_scale`) to the value paths and
// compares the squared errors with estimate.mse.
EmpiricalReport empirical_mse(const EstimateResult& estimate, const Eigen::MatrixXd& values,
                              const TargetFunctional& target, double weight_scale = 1.0);

// Threads used for independent trials: hardware concurrency capped by INCREX_MAX_THREADS.
int worker_threads(int jobs);

double pairwise_sum(const double* x, Eigen::Index n);

}  // namespace increx
