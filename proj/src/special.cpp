#include "increx/special.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace increx {

QuadratureRule gauss_legendre(int points) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

Eigen::VectorXd sine_integral_at_pi_multiples(int kmax) {
  constexpr double pi = std::numbers::pi;
  static const QuadratureRule rule = gauss_legendre(24);
  Eigen::VectorXd si(kmax + 1);
  si[0] = 0.0;
  double acc = 0.0;
  for (int k = 0; k < kmax; ++k) {
    double a = k * pi, half = pi / 2.0, mid = a + half;
    double piece = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      double t = mid + half * rule.nodes[i];
      piece += rule.weights[i] * std::sin(t) / t;
    }
    acc += half * piece;
    si[k + 1] = acc;
  }
  return si;
}

Eigen::VectorXd sinc_outer_cepstrum(int length) {
  constexpr double pi = std::numbers::pi;
  Eigen::VectorXd c(length);
  if (length == 0) return c;
  Eigen::VectorXd si = sine_integral_at_pi_multiples(length);
  c[0] = 1.0 - std::log(pi);
  for (int k = 1; k < length; ++k) c[k] = 2.0 * (si[k] - pi / 2.0) / (pi * k);
  return c;
}

}  // namespace increx
