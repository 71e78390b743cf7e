#pragma once

#include "increx/extrapolation.hpp"
#include "increx/grid.hpp"
#include "increx/increments.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace increx {

struct ClassD0 {
  double P0 = 1.0;
};

// Cosine moments rho(0..M) with rho(0) = P0.
struct ClassDM {
  Eigen::VectorXd rho;
};

struct ClassDvu {
  DensityGrid v, u;  // u may hold +inf
  double P0 = 1.0;
};

struct ClassDeps {
  DensityGrid v;
  double eps = 0.0;
};

using DensityClassSpec = std::variant<ClassD0, ClassDM, ClassDvu, ClassDeps>;

std::string class_name(const DensityClassSpec& cls);

// Power level ||phi||^2 of the stationary branch: P0, rho(0), or P1 = eps + mean(v).
double class_power(const DensityClassSpec& cls);

// Throws InfeasibleBounds, MomentInfeasible or DomainError for invalid parameters.
void validate_class(const DensityClassSpec& cls, const FrequencyGrid& grid);

// Largest violation of the class constraints by f (0 when f is in the class).
double class_membership_defect(const DensityGrid& f, const DensityClassSpec& cls);

// r = M phi with M = D A W, a symmetric Hankel matrix.
struct ExtremalProblem {
  IncrementSpec spec;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd w;
  Eigen::MatrixXd M;
  bool finite = true;

  int dim() const { return static_cast<int>(M.rows()); }
};

ExtremalProblem extremal_problem_finite(const Eigen::VectorXd& a_N, IncrementSpec spec, int N);
ExtremalProblem extremal_problem_infinite(const FunctionalCoefficients& a, IncrementSpec spec, int S);
ExtremalProblem extremal_problem(const FunctionalCoefficients& a, IncrementSpec spec, int S);

enum class Branch { Stationary, FixedPoint };

constexpr const char* to_string(Branch b) {
  return b == Branch::Stationary ? "stationary" : "fixed_point";
}

struct MinimaxOptions {
  int candidates = 4;
  double damping = 0.5;
  int max_iterations = 500;
  double tolerance = 1e-9;
  bool try_stationary = true;
  int truncation = 256;               // S for infinite functionals
  double stability_tolerance = 1e-6;  // sigma_max drift between S and 2S
};

struct LeastFavorableResult {
  std::string class_name;
  Branch branch = Branch::Stationary;
  IncrementSpec spec;
  Eigen::VectorXd phi0;         // canonical factor of f0
  DensityGrid f0;
  Eigen::VectorXd r0;           // M phi0
  Eigen::VectorXd phi_mu;       // w * phi0
  SpectralCharacteristic h0;
  double extremal_value = 0.0;  // ||M phi0||^2
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double sigma_max = 0.0;
  Eigen::VectorXd denominator;  // D_M: f0 = |r|^2 / |sum c_m e^{-i l m}|^2
  int iterations = 0;
  double fixed_point_residual = 0.0;
  double lower_clamped_fraction = 0.0;
  double upper_clamped_fraction = 0.0;
  double truncation_drift = 0.0;
};

LeastFavorableResult least_favorable(const ExtremalProblem& problem, const DensityClassSpec& cls,
                                     const FrequencyGrid& grid, const MinimaxOptions& options = {});

LeastFavorableResult lf_density_D0_finite(const Eigen::VectorXd& a_N, IncrementSpec spec, double P0,
                                          const FrequencyGrid& grid, int N,
                                          const MinimaxOptions& options = {});
LeastFavorableResult lf_density_D0_infinite(const FunctionalCoefficients& a, IncrementSpec spec,
                                            double P0, const FrequencyGrid& grid,
                                            const MinimaxOptions& options = {});
LeastFavorableResult lf_density_DM(const Eigen::VectorXd& a_N, IncrementSpec spec,
                                   const Eigen::VectorXd& rho, const FrequencyGrid& grid, int N,
                                   const MinimaxOptions& options = {});
LeastFavorableResult lf_density_Dvu(const FunctionalCoefficients& a, IncrementSpec spec,
                                    const DensityGrid& v, const DensityGrid& u, double P0,
                                    const MinimaxOptions& options = {});
LeastFavorableResult lf_density_Deps(const FunctionalCoefficients& a, IncrementSpec spec,
                                     const DensityGrid& v, double eps,
                                     const MinimaxOptions& options = {});

// (1/2pi) int |r|^2 / f0 * f.
double mse_mismatch(const Eigen::VectorXd& r, const DensityGrid& f0, const DensityGrid& f);

struct ProbeRecord {
  int id = 0;
  std::string kind;
  double delta = 0.0;  // Delta(h0; f) - Delta(h0; f0)
};

struct SaddleReport {
  double base = 0.0;                 // Delta(h0; f0)
  double max_right_violation = 0.0;  // max over probes of Delta(h0; f) - Delta(h0; f0)
  double min_left_gap = 0.0;         // min over perturbations of Delta(h; f0) - Delta(h0; f0)
  double left_base = 0.0;            // Delta(h0; f0) recomputed from h0 on the grid
  double tolerance = 1e-6;
  bool right_ok = true;
  bool left_ok = true;
  std::vector<ProbeRecord> probes;
};

SaddleReport saddle_check(const LeastFavorableResult& result, const DensityClassSpec& cls, int probes,
                          std::uint64_t seed, double tolerance = 1e-6);

// Random densities inside the class.
std::vector<DensityGrid> sample_class(const DensityClassSpec& cls, const FrequencyGrid& grid,
                                      const DensityGrid& f0, int count, std::uint64_t seed,
                                      std::vector<std::string>* kinds = nullptr);

struct TwoTermSolution {
  double phi0 = 0.0;
  double phi1 = 0.0;
  double alpha = 0.0;      // eigenvalue of the 2x2 extremal matrix for (phi0, phi1)
  double parameter = 0.0;  // (x +- sqrt(x^2 + 4y^2)) / (2y) by the sign of y
  double x = 0.0;
  double y = 0.0;
};

// Stationary least favorable factor of the power class for a(0) xi(0) + a(1) xi(1) with n = 1.
// Throws DegenerateXY when x or y vanishes.
TwoTermSolution closed_form_two_term(double a, double b, IncrementSpec spec, double P0, double w0, double w1);

// Cosine moments (1/2pi) int f cos(m l), m = 0..M.
Eigen::VectorXd cosine_moments(const DensityGrid& f, int M);

// Maximum-entropy density with autocovariances rho(0..M), optionally extended by
// reflection coefficients beyond M.
DensityGrid max_entropy_density(const Eigen::VectorXd& rho, const FrequencyGrid& grid,
                                const Eigen::VectorXd& extra_reflections = {});

}  // namespace increx
