#include "increx/grid.hpp"

#include "increx/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <vector>

namespace increx {

namespace {

constexpr double pi = std::numbers::pi;

// Twist factor (-1)^k e^{i pi k / G} linking grid nodes to FFT bins.
cplx twist(long k, int G) {
  double angle = pi * static_cast<double>(k % (2L * G)) / G;
  cplx t(std::cos(angle), std::sin(angle));
  return (k % 2 == 0) ? t : -t;
}

}  // namespace

IncrementSpec::IncrementSpec(int order, int step) : n(order), mu(step) {
  if (order < 1 || step < 1) {
    throw Error(ErrorKind::DomainError, "increment order and step must be >= 1");
  }
}

FrequencyGrid::FrequencyGrid(int size) : size_(size) {
  if (size < 2 || size % 2 != 0) {
    throw Error(ErrorKind::DomainError, "grid size must be a positive even integer");
  }
}

double FrequencyGrid::spacing() const { return 2.0 * pi / size_; }

double FrequencyGrid::node(int j) const { return -pi + (j + 0.5) * spacing(); }

Eigen::VectorXd FrequencyGrid::nodes() const {
  Eigen::VectorXd x(size_);
  for (int j = 0; j < size_; ++j) x[j] = node(j);
  return x;
}

Eigen::VectorXcd FrequencyGrid::coefficients(const Eigen::VectorXcd& samples, int kmin,
                                             int kmax) const {
  const int G = size_;
  std::vector<cplx> in(samples.data(), samples.data() + G), out;
  Eigen::FFT<double> fft;
  fft.inv(out, in);  // (1/G) sum_j x_j e^{2 pi i j k / G}
  Eigen::VectorXcd c(kmax - kmin + 1);
  for (int k = kmin; k <= kmax; ++k) {
    long m = ((k % G) + G) % G;
    // e^{i lambda_j k} is anti-periodic in k with period G.
    long wraps = (static_cast<long>(k) - m) / G;
    double sign = (wraps % 2 == 0) ? 1.0 : -1.0;
    c[k - kmin] = sign * twist(m, G) * out[m];
  }
  return c;
}

Eigen::VectorXcd FrequencyGrid::coefficients(const Eigen::VectorXd& samples, int kmin,
                                             int kmax) const {
  return coefficients(Eigen::VectorXcd(samples.cast<cplx>()), kmin, kmax);
}

Eigen::VectorXcd FrequencyGrid::evaluate(const Eigen::VectorXcd& coeffs) const {
  const int G = size_;
  std::vector<cplx> folded(G, cplx(0.0)), out;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    long wraps = k / G;
    double sign = (wraps % 2 == 0) ? 1.0 : -1.0;
    folded[k % G] += sign * coeffs[k];
  }
  for (int k = 0; k < G; ++k) folded[k] *= std::conj(twist(k, G));
  Eigen::FFT<double> fft;
  fft.fwd(out, folded);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), G);
}

Eigen::VectorXcd FrequencyGrid::evaluate(const Eigen::VectorXd& coeffs) const {
  return evaluate(Eigen::VectorXcd(coeffs.cast<cplx>()));
}

DensityGrid::DensityGrid(FrequencyGrid grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorKind::DomainError, "density sample count differs from grid size");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || std::isnan(v)) {
      throw Error(ErrorKind::DomainError, "density values must be nonnegative");
    }
  }
}

DensityGrid DensityGrid::sample(const FrequencyGrid& grid, const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid.size());
  for (int j = 0; j < grid.size(); ++j) v[j] = f(grid.node(j));
  return DensityGrid(grid, std::move(v));
}

DensityGrid DensityGrid::constant(const FrequencyGrid& grid, double value) {
  return DensityGrid(grid, Eigen::VectorXd::Constant(grid.size(), value));
}

}  // namespace increx
