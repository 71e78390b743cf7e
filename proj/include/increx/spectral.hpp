#pragma once

#include "increx/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>

namespace increx {

struct FactorOptions {
  int truncation = 1024;     // L, coefficients phi(0..L)
  double tolerance = 1e-8;   // relative to max f
  bool enforce = true;       // throw ToleranceNotMet when the check fails
  double floor = 1e-14;      // relative floor applied before taking logs
};

struct CanonicalFactor {
  Eigen::VectorXd coeffs;
  double reconstruction_error = 0.0;
  double floor_value = 0.0;
  int floored_nodes = 0;
  int grid_size = 0;
  std::string route = "cepstrum";
  Eigen::VectorXcd boundary;  // Phi(e^{-i lambda_j}) from the full grid cepstrum

  Eigen::Index length() const { return coeffs.size(); }
  double operator[](Eigen::Index k) const { return k < coeffs.size() ? coeffs[k] : 0.0; }
};

struct OuterFactorW {
  IncrementSpec spec;
  Eigen::VectorXd coeffs;      // w(0..L)
  Eigen::VectorXcd boundary;   // w(e^{-i lambda_j}) on the grid
  int grid_size = 0;
  double reconstruction_error = 0.0;
};

struct FactorCheck {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  bool min_phase = false;
};

double increment_kernel(double lambda, IncrementSpec spec);
Eigen::VectorXd increment_kernel(const FrequencyGrid& grid, IncrementSpec spec);

// (sin(x/2)/(x/2))^{2n}, the zero-free part of g.
double smooth_kernel(double lambda, int n);

double distance_to_kernel_zero(double lambda, IncrementSpec spec);

OuterFactorW outer_factor_w(IncrementSpec spec, const FrequencyGrid& grid, int L,
                            double tolerance = 1e-8);

// Closed-form coefficients w(0..length-1) without grid work.
Eigen::VectorXd outer_factor_coeffs(IncrementSpec spec, int length);

CanonicalFactor canonical_factorization(const DensityGrid& f, const FactorOptions& options = {});

// Samples f on grids of size start, 2 start, ... up to max until the check passes.
CanonicalFactor canonical_factorization(const std::function<double(double)>& f,
                                        const FactorOptions& options = {}, int start = 4096,
                                        int max = 65536);

// Factor of g(lambda) f(lambda).
CanonicalFactor increment_density_factor(const DensityGrid& f, IncrementSpec spec,
                                         const FactorOptions& options = {});

FactorCheck verify_factorization(const Eigen::VectorXd& phi, const DensityGrid& f);

bool is_minimum_phase(const Eigen::VectorXd& phi);

// |sum_k phi_k e^{-i lambda_j k}|^2 on the grid.
Eigen::VectorXd power_spectrum(const Eigen::VectorXd& phi, const FrequencyGrid& grid);

}  // namespace increx
