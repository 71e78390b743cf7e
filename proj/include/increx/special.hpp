#pragma once

#include <Eigen/Core>

namespace increx {

struct QuadratureRule {
  Eigen::VectorXd nodes;    // on [-1, 1]
  Eigen::VectorXd weights;
};

// Gauss-Legendre rule by the Golub-Welsch eigenvalue method.
QuadratureRule gauss_legendre(int points);

// Si(pi k) for k = 0..kmax, accumulated half-period by half-period.
Eigen::VectorXd sine_integral_at_pi_multiples(int kmax);

// Causal log coefficients C_k of the outer function of (sin(x/2)/(x/2))^2:
// C_0 = 1 - ln pi, C_k = -1/k + 2 Si(pi k)/(pi k).
Eigen::VectorXd sinc_outer_cepstrum(int length);

}  // namespace increx
