#pragma once

#include "increx/grid.hpp"
#include "increx/spectral.hpp"
#include "increx/structured.hpp"

#include <Eigen/Core>

#include <optional>

namespace increx {

// |a(k)| <= constant * ratio^k beyond the stored coefficients.
struct TailBound {
  double constant = 0.0;
  double ratio = 0.0;
};

class FunctionalCoefficients {
 public:
  static FunctionalCoefficients finite(Eigen::VectorXd a);
  static FunctionalCoefficients truncated(Eigen::VectorXd a, std::optional<TailBound> tail);

  bool is_finite() const { return finite_; }
  int horizon() const { return static_cast<int>(a_.size()) - 1; }
  const Eigen::VectorXd& values() const { return a_; }
  const std::optional<TailBound>& tail() const { return tail_; }

 private:
  FunctionalCoefficients(Eigen::VectorXd a, bool finite, std::optional<TailBound> tail);

  Eigen::VectorXd a_;
  bool finite_ = true;
  std::optional<TailBound> tail_;
};

struct ConditionDiagnostics {
  double abs_sum = 0.0;              // sum |b(k)|
  double weighted_square_sum = 0.0;  // sum (k+1) b(k)^2
  double tail_bound = 0.0;           // bound on the mass of sum |b| lost to truncation
  bool ok = true;
};

struct IncrementWeights {
  Eigen::VectorXd b;  // b(0..K)
  Eigen::VectorXd v;  // v(-1), v(-2), ..., v(-mu n)
  ConditionDiagnostics conditions;

  double v_at(int k) const { return v[-k - 1]; }
};

// b(k) = sum_{m >= k} a(m) d(m - k).
Eigen::VectorXd b_from_a(const FunctionalCoefficients& a, IncrementSpec spec,
                         ConditionDiagnostics* diagnostics = nullptr, double tolerance = 1e-10);

// v(k) = sum_{l = ceil(-k/mu)}^{n} (-1)^l C(n,l) b(l mu + k), k = -1..-mu n.
Eigen::VectorXd v_from_b(const Eigen::VectorXd& b, IncrementSpec spec);

// Finite variant with upper limit min(floor((N-k)/mu), n).
Eigen::VectorXd v_N_from_b(const Eigen::VectorXd& b, IncrementSpec spec, int N);

IncrementWeights increment_weights(const FunctionalCoefficients& a, IncrementSpec spec);

// Formal inverse of b_from_a: a(k) = sum_l (-1)^l C(n,l) b(k + l mu).
Eigen::VectorXd a_from_b(const Eigen::VectorXd& b, IncrementSpec spec);

StructuredMatrix<double> build_D(IncrementSpec spec, int size);
StructuredMatrix<double> build_D_N(IncrementSpec spec, int N);
StructuredMatrix<double> build_D_hat_N(IncrementSpec spec, int N);
StructuredMatrix<double> build_W(const OuterFactorW& w, int size);
StructuredMatrix<double> build_W(IncrementSpec spec, int size);
StructuredMatrix<double> build_W_N(IncrementSpec spec, int N);
StructuredMatrix<double> build_A(const Eigen::VectorXd& a, int size);
StructuredMatrix<double> build_A_N(const Eigen::VectorXd& a, int N);
StructuredMatrix<double> build_B(const Eigen::VectorXd& b, int size);

}  // namespace increx
