#pragma once

#include <Eigen/Core>

#include <complex>
#include <functional>

namespace increx {

using cplx = std::complex<double>;

// Increment order n and step mu of the difference (1 - B^mu)^n.
struct IncrementSpec {
  int n = 1;
  int mu = 1;

  IncrementSpec() = default;
  IncrementSpec(int order, int step);
};

// Midpoint grid lambda_j = -pi + (j + 1/2) 2pi/G on [-pi, pi).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int size = 4096);

  int size() const { return size_; }
  double spacing() const;
  double node(int j) const;
  Eigen::VectorXd nodes() const;

  // Samples x_j -> c_k = (1/G) sum_j x_j e^{i lambda_j k} for k = kmin..kmax.
  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& samples, int kmin, int kmax) const;
  Eigen::VectorXcd coefficients(const Eigen::VectorXd& samples, int kmin, int kmax) const;

  // sum_k p_k e^{-i lambda_j k} at every node; p may be longer than G.
  Eigen::VectorXcd evaluate(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXcd evaluate(const Eigen::VectorXcd& coeffs) const;

  // (1/G) sum_j x_j, the midpoint rule for (1/2pi) int x.
  double mean(const Eigen::VectorXd& samples) const { return samples.mean(); }

  bool operator==(const FrequencyGrid& other) const { return size_ == other.size_; }

 private:
  int size_;
};

class DensityGrid {
 public:
  DensityGrid() : grid_(2), values_(Eigen::VectorXd::Zero(2)) {}
  DensityGrid(FrequencyGrid grid, Eigen::VectorXd values);

  static DensityGrid sample(const FrequencyGrid& grid, const std::function<double(double)>& f);
  static DensityGrid constant(const FrequencyGrid& grid, double value);

  const FrequencyGrid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return grid_.size(); }
  double operator[](int j) const { return values_[j]; }

  // (1/2pi) int f dlambda by the midpoint rule.
  double power() const { return values_.mean(); }

 private:
  FrequencyGrid grid_;
  Eigen::VectorXd values_;
};

}  // namespace increx
