#pragma once

#include <Eigen/Core>

#include <algorithm>

namespace increx {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Scalar binomial(int n, int k) {
  if (k < 0 || k > n) return Scalar(0);
  Scalar c(1);
  for (int i = 1; i <= k; ++i) c = c * Scalar(n - k + i) / Scalar(i);
  return c;
}

// Causal product of two sequences, cut to `length` terms (-1 keeps all).
template <typename DerivedA, typename DerivedB>
Vec<typename DerivedA::Scalar> convolve(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b,
                                        Eigen::Index length = -1) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index full = a.size() + b.size() - 1;
  const Eigen::Index len = length < 0 ? full : length;
  Vec<Scalar> c = Vec<Scalar>::Zero(len);
  for (Eigen::Index i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == Scalar(0)) continue;
    const Eigen::Index m = std::min<Eigen::Index>(b.size(), len - i);
    c.segment(i, m) += a[i] * b.head(m);
  }
  return c;
}

// exp of a power series: phi_0 = exp(c_0), k phi_k = sum_{j=1}^k j c_j phi_{k-j}.
template <typename Derived>
Vec<typename Derived::Scalar> series_exp(const Eigen::MatrixBase<Derived>& c, Eigen::Index length) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  Vec<Scalar> phi = Vec<Scalar>::Zero(length);
  if (length == 0) return phi;
  phi[0] = exp(c[0]);
  for (Eigen::Index k = 1; k < length; ++k) {
    Scalar acc(0);
    const Eigen::Index top = std::min<Eigen::Index>(k, c.size() - 1);
    for (Eigen::Index j = 1; j <= top; ++j) acc += Scalar(j) * c[j] * phi[k - j];
    phi[k] = acc / Scalar(k);
  }
  return phi;
}

// Reciprocal power series 1/p to `length` terms; p[0] must be nonzero.
template <typename Derived>
Vec<typename Derived::Scalar> series_inverse(const Eigen::MatrixBase<Derived>& p, Eigen::Index length) {
  using Scalar = typename Derived::Scalar;
  Vec<Scalar> q = Vec<Scalar>::Zero(length);
  if (length == 0) return q;
  q[0] = Scalar(1) / p[0];
  for (Eigen::Index k = 1; k < length; ++k) {
    Scalar acc(0);
    const Eigen::Index top = std::min<Eigen::Index>(k, p.size() - 1);
    for (Eigen::Index j = 1; j <= top; ++j) acc += p[j] * q[k - j];
    q[k] = -acc * q[0];
  }
  return q;
}

// Coefficients of (1 - z^mu)^n.
template <typename Scalar = double>
Vec<Scalar> difference_polynomial(int n, int mu) {
  Vec<Scalar> p = Vec<Scalar>::Zero(n * mu + 1);
  for (int l = 0; l <= n; ++l) p[l * mu] = (l % 2 == 0 ? Scalar(1) : Scalar(-1)) * binomial<Scalar>(n, l);
  return p;
}

}  // namespace increx
