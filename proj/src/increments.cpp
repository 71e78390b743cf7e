#include "increx/increments.hpp"

#include "increx/error.hpp"

#include <cmath>
#include <string>

namespace increx {

FunctionalCoefficients::FunctionalCoefficients(Eigen::VectorXd a, bool finite,
                                               std::optional<TailBound> tail)
    : a_(std::move(a)), finite_(finite), tail_(tail) {
  if (a_.size() == 0) throw Error(ErrorKind::DomainError, "functional needs at least one coefficient");
}

FunctionalCoefficients FunctionalCoefficients::finite(Eigen::VectorXd a) {
  return FunctionalCoefficients(std::move(a), true, std::nullopt);
}

FunctionalCoefficients FunctionalCoefficients::truncated(Eigen::VectorXd a,
                                                         std::optional<TailBound> tail) {
  return FunctionalCoefficients(std::move(a), false, tail);
}

namespace {

// Bound on sum_k |b(k)| contributed by the coefficients a(m), m > K.
double truncation_mass(const TailBound& tail, IncrementSpec spec, int K) {
  double bound = 0.0, cumulative_d = 0.0, term_scale = std::pow(tail.ratio, K + 1);
  // sum_{m>K} rho^m sum_{j<=m} d(j), summed until terms are negligible
  for (int m = 0;; ++m) {
    if (m % spec.mu == 0) cumulative_d += binomial<double>(m / spec.mu + spec.n - 1, spec.n - 1);
    if (m <= K) continue;
    double term = term_scale * cumulative_d;
    bound += term;
    term_scale *= tail.ratio;
    if (term < 1e-18 * std::max(bound, 1e-300) || m > K + 200000) break;
  }
  return tail.constant * bound;
}

}  // namespace

Eigen::VectorXd b_from_a(const FunctionalCoefficients& a, IncrementSpec spec,
                         ConditionDiagnostics* diagnostics, double tolerance) {
  const Eigen::VectorXd& x = a.values();
  const Eigen::Index K = x.size();
  Eigen::VectorXd b = build_D(spec, static_cast<int>(K)).matrix * x;

  ConditionDiagnostics diag;
  diag.abs_sum = b.cwiseAbs().sum();
  for (Eigen::Index k = 0; k < K; ++k) diag.weighted_square_sum += (k + 1) * b[k] * b[k];
  if (!a.is_finite()) {
    if (!a.tail()) {
      throw Error(ErrorKind::ConditionViolated, "truncated functional has no declared tail bound");
    }
    const TailBound& tail = *a.tail();
    if (!(tail.ratio >= 0.0 && tail.ratio < 1.0) || tail.constant < 0.0) {
      throw Error(ErrorKind::ConditionViolated, "tail bound must have ratio in [0,1) and constant >= 0");
    }
    diag.tail_bound = truncation_mass(tail, spec, static_cast<int>(K) - 1);
    diag.ok = diag.tail_bound <= tolerance * std::max(1.0, diag.abs_sum);
    if (!diag.ok) {
      throw Error(ErrorKind::ConditionViolated,
                  "partial sums of |b| not settled: neglected mass up to " +
                      num(diag.tail_bound));
    }
  }
  if (diagnostics) *diagnostics = diag;
  return b;
}

Eigen::VectorXd v_from_b(const Eigen::VectorXd& b, IncrementSpec spec) {
  return v_N_from_b(b, spec, static_cast<int>(b.size()) - 1);
}

Eigen::VectorXd v_N_from_b(const Eigen::VectorXd& b, IncrementSpec spec, int N) {
  const int n = spec.n, mu = spec.mu;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n * mu);
  for (int k = -1; k >= -n * mu; --k) {
    int lo = (-k + mu - 1) / mu;  // ceil(-k/mu) for k < 0
    int hi = std::min((N - k) / mu, n);
    double acc = 0.0;
    for (int l = lo; l <= hi; ++l) {
      int idx = l * mu + k;
      if (idx < b.size()) acc += (l % 2 == 0 ? 1.0 : -1.0) * binomial<double>(n, l) * b[idx];
    }
    v[-k - 1] = acc;
  }
  return v;
}

IncrementWeights increment_weights(const FunctionalCoefficients& a, IncrementSpec spec) {
  IncrementWeights w;
  w.b = b_from_a(a, spec, &w.conditions);
  w.v = a.is_finite() ? v_N_from_b(w.b, spec, a.horizon()) : v_from_b(w.b, spec);
  return w;
}

Eigen::VectorXd a_from_b(const Eigen::VectorXd& b, IncrementSpec spec) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(b.size());
  for (Eigen::Index k = 0; k < b.size(); ++k)
    for (int l = 0; l <= spec.n && k + l * spec.mu < b.size(); ++l)
      a[k] += (l % 2 == 0 ? 1.0 : -1.0) * binomial<double>(spec.n, l) * b[k + l * spec.mu];
  return a;
}

StructuredMatrix<double> build_D(IncrementSpec spec, int size) {
  return upper_toeplitz(d_mu_coeffs(spec.n, spec.mu, size), size);
}

StructuredMatrix<double> build_D_N(IncrementSpec spec, int N) { return build_D(spec, N + 1); }

StructuredMatrix<double> build_D_hat_N(IncrementSpec spec, int N) {
  Eigen::VectorXd d = d_mu_coeffs(spec.n, spec.mu, N + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int k = 0; k <= N; ++k)
    for (int l = N - k; l <= N; ++l) m(k, l) = d[l + k - N];
  return {std::move(m), Structure::General};
}

StructuredMatrix<double> build_W(const OuterFactorW& w, int size) {
  if (w.coeffs.size() < size) {
    throw Error(ErrorKind::DomainError, "outer factor truncated below the requested matrix size");
  }
  return lower_toeplitz(w.coeffs, size);
}

StructuredMatrix<double> build_W(IncrementSpec spec, int size) {
  return lower_toeplitz(outer_factor_coeffs(spec, size), size);
}

StructuredMatrix<double> build_W_N(IncrementSpec spec, int N) { return build_W(spec, N + 1); }

StructuredMatrix<double> build_A(const Eigen::VectorXd& a, int size) { return hankel(a, size); }

StructuredMatrix<double> build_A_N(const Eigen::VectorXd& a, int N) {
  return hankel(Eigen::VectorXd(a.head(std::min<Eigen::Index>(a.size(), N + 1))), N + 1);
}

StructuredMatrix<double> build_B(const Eigen::VectorXd& b, int size) { return hankel(b, size); }

}  // namespace increx
