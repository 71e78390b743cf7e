#pragma once

// Independent reference computations used by the tests.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline double midpoint(int j, int G) { return -pi + (j + 0.5) * 2.0 * pi / G; }

// Direct sum of p_k e^{sign i lambda k}.
inline cplx poly(const Eigen::VectorXd& p, double lambda, double sign = -1.0) {
  cplx acc = 0.0;
  for (Eigen::Index k = p.size() - 1; k >= 0; --k) acc = acc * std::polar(1.0, sign * lambda) + p[k];
  return acc;
}

inline double kernel(double lambda, int n, int mu) {
  cplx d = 1.0 - std::polar(1.0, -lambda * mu);
  return std::pow(std::norm(d) / (lambda * lambda), n);
}

// (1/2pi) int ln g by a fine midpoint rule.
inline double mean_log_kernel(int n, int mu, int nodes) {
  double acc = 0.0;
  for (int j = 0; j < nodes; ++j) acc += std::log(kernel(midpoint(j, nodes), n, mu));
  return acc / nodes;
}

// Number of ordered ways to write k as a sum of n nonnegative multiples of mu.
inline std::vector<double> compositions(int n, int mu, int length) {
  std::vector<double> ways(length, 0.0);
  ways[0] = 1.0;
  for (int part = 0; part < n; ++part) {
    std::vector<double> next(length, 0.0);
    for (int k = 0; k < length; ++k)
      for (int step = 0; k + step < length; step += mu) next[k + step] += ways[k];
    ways = next;
  }
  return ways;
}

// Integrated MA(1) density lambda^2 |1 + phi e^{i lambda}|^2 / |1 - e^{i lambda}|^2.
inline double ima1_density(double lambda, double phi) {
  return lambda * lambda * std::norm(1.0 + phi * std::polar(1.0, lambda)) /
         std::norm(1.0 - std::polar(1.0, lambda));
}

// lambda^{2n} |num(e^{i lambda})|^2 / |1 - e^{i lambda}|^{2n}: g f is |P num|^2 with P = 1 + ... + z^{mu-1}.
inline double arima_density(double lambda, int n, const Eigen::VectorXd& num) {
  return std::pow(lambda * lambda / std::norm(1.0 - std::polar(1.0, lambda)), n) *
         std::norm(poly(num, lambda, 1.0));
}

inline double ima1_mse(double a, double b, double phi) {
  return a * a + 2 * a * b * (1 + phi) + b * b * (2 + 2 * phi + phi * phi);
}

// Displayed characteristic h(lambda) of the integrated MA(1) model for the functional a xi(0) + b xi(1).
inline cplx ima1_characteristic(double lambda, double a, double b, double phi, int mu) {
  cplx u = std::polar(1.0, lambda), ubar = std::conj(u);
  double delta = mu == 1 ? 1.0 : 0.0;
  cplx num = (1.0 - ubar) * (a + b * (1 + phi) + b * u);
  cplx den = (1.0 + phi * ubar) * (1.0 - std::pow(ubar, mu));
  return (a + delta * b) + b * u - num / den;
}

inline double ima1_weight(double a, double b, double phi, int k) {
  return (a + b) * (1 + phi) * std::pow(-phi, k - 1);
}

}  // namespace oracle
