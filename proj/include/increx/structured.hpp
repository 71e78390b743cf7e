#pragma once

#include "increx/series.hpp"

#include <string_view>

namespace increx {

enum class Structure { UpperToeplitz, LowerToeplitz, Hankel, General };

constexpr std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::UpperToeplitz: return "upper_toeplitz";
    case Structure::LowerToeplitz: return "lower_toeplitz";
    case Structure::Hankel: return "hankel";
    case Structure::General: return "general";
  }
  return "general";
}

template <typename Scalar>
struct StructuredMatrix {
  Mat<Scalar> matrix;
  Structure structure = Structure::General;

  Eigen::Index size() const { return matrix.rows(); }
};

// d_mu(k): coefficient of x^k in (sum_j x^{mu j})^n.
template <typename Scalar = double>
Vec<Scalar> d_mu_coeffs(int n, int mu, Eigen::Index length) {
  Vec<Scalar> d = Vec<Scalar>::Zero(length);
  for (Eigen::Index k = 0; k < length; k += mu) {
    d[k] = binomial<Scalar>(static_cast<int>(k / mu) + n - 1, n - 1);
  }
  return d;
}

// M(k, j) = m(j - k) for j >= k.
template <typename Derived>
StructuredMatrix<typename Derived::Scalar> upper_toeplitz(const Eigen::MatrixBase<Derived>& m,
                                                          Eigen::Index size) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> out = Mat<Scalar>::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k)
    for (Eigen::Index j = k; j < size && j - k < m.size(); ++j) out(k, j) = m[j - k];
  return {std::move(out), Structure::UpperToeplitz};
}

// M(j, k) = m(j - k) for j >= k.
template <typename Derived>
StructuredMatrix<typename Derived::Scalar> lower_toeplitz(const Eigen::MatrixBase<Derived>& m,
                                                          Eigen::Index size) {
  auto up = upper_toeplitz(m, size);
  return {up.matrix.transpose(), Structure::LowerToeplitz};
}

// M(k, j) = m(k + j), zero where k + j is past the end of m.
template <typename Derived>
StructuredMatrix<typename Derived::Scalar> hankel(const Eigen::MatrixBase<Derived>& m,
                                                  Eigen::Index size) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> out = Mat<Scalar>::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k)
    for (Eigen::Index j = 0; j < size && k + j < m.size(); ++j) out(k, j) = m[k + j];
  return {std::move(out), Structure::Hankel};
}

}  // namespace increx
