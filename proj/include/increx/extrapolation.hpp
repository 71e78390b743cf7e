#pragma once

#include "increx/grid.hpp"
#include "increx/increments.hpp"
#include "increx/spectral.hpp"

#include <Eigen/Core>

#include <string>

namespace increx {

// Whether the estimated functional acts on increments or on raw values.
// Raw-value functionals carry the boundary term -sum v(k) xi(k).
enum class FunctionalKind { Increments, Values };

struct SpectralCharacteristic {
  FrequencyGrid grid;
  Eigen::VectorXcd samples;  // h(lambda_j)
  Eigen::VectorXd b;         // B(e^{i lambda}) = sum b(k) e^{i lambda k}
  Eigen::VectorXd r;         // r(e^{i lambda}) = sum r(j) e^{i lambda j}
  IncrementSpec spec;
  FunctionalKind kind = FunctionalKind::Increments;
  std::string provenance;
};

struct EstimateResult {
  SpectralCharacteristic characteristic;
  Eigen::VectorXd phi_mu;            // factor of g f used for the estimate
  Eigen::VectorXd past_weights;      // entry k-1 multiplies xi(-k); includes the boundary term
  Eigen::VectorXd boundary_weights;  // entry k-1 multiplies xi(-k), k = 1..mu n
  double mse = 0.0;                  // ||r||^2
  double mse_quadrature = 0.0;       // (1/2pi) int |r|^2
  double tail_energy = 0.0;          // estimated sum of squared weights past the horizon
  double inversion_residual = 0.0;
  bool tail_warning = false;
};

struct ExtrapolationOptions {
  FactorOptions factor;
  int horizon = 512;         // K
  double tolerance = 1e-6;   // Fourier inversion residual, relative
};

SpectralCharacteristic characteristic_B(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu,
                                        const FrequencyGrid& grid, IncrementSpec spec,
                                        FunctionalKind kind = FunctionalKind::Increments,
                                        std::string provenance = "increments",
                                        const Eigen::VectorXcd& phi_boundary = {});

// r(j) = sum_i b(i + j) phi_mu(i), j = 0..len(b)-1.
Eigen::VectorXd characteristic_coeffs(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu);

double mse_B(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu);
double mse_quadrature(const SpectralCharacteristic& h);

// Raw-value weights c(-1..-K) realizing the estimate, boundary term included.
Eigen::VectorXd filter_weights(const SpectralCharacteristic& h, const Eigen::VectorXd& phi_mu, int K,
                               double tolerance = 1e-6, double* residual = nullptr);

// (1/2pi) int (B(e^{i l}) - h(l)) g(l) f(l) e^{-i l k} dl for k = kmin..kmax.
Eigen::VectorXcd orthogonality_defects(const SpectralCharacteristic& h, const DensityGrid& f,
                                       int kmin, int kmax);

EstimateResult estimate_with_factor(const Eigen::VectorXd& b, const Eigen::VectorXd& phi_mu,
                                    const FrequencyGrid& grid, IncrementSpec spec,
                                    FunctionalKind kind, const std::string& provenance,
                                    const ExtrapolationOptions& options = {},
                                    const Eigen::VectorXcd& phi_boundary = {});

EstimateResult predict_increment(int m, IncrementSpec spec, const Eigen::VectorXd& phi_mu,
                                 const FrequencyGrid& grid, const ExtrapolationOptions& options = {});

EstimateResult predict_value(int m, IncrementSpec spec, const Eigen::VectorXd& phi_mu,
                             const FrequencyGrid& grid, const ExtrapolationOptions& options = {});

EstimateResult estimate_functional_A(const FunctionalCoefficients& a, const DensityGrid& f,
                                     IncrementSpec spec, const ExtrapolationOptions& options = {});

EstimateResult estimate_functional_AN(const Eigen::VectorXd& a_N, const DensityGrid& f,
                                      IncrementSpec spec, int N,
                                      const ExtrapolationOptions& options = {});

}  // namespace increx
