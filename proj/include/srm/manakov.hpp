#pragma once

/**
 * @file
 * @brief Manakov-type integrals: lambda-coefficients of (1/k) Tr(M + lambda A)^k.
 *
 * With A = J_sR these are the sub-Riemannian integrals h_{k,r}, with A = J^2
 * the Riemannian Manakov integrals f_{k,r}. In both cases
 *
 *     (1/k) Tr(M + lambda A)^k = sum_r lambda^(k-r) h_{k,r}(M),
 *
 * and d/dM of the left side is (M + lambda A)^(k-1) in the trace
 * identification dh(delta) = Tr(D delta).
 *
 * Coefficients are recovered from values at the nodes rho * {0, 1, -1, 2, -2, ...}
 * by a Vandermonde solve. rho = |M| / |A| balances the two terms so the
 * solve stays accurate up to the degree cap.
 */

#include <cmath>
#include <string>
#include <vector>

#include "srm/metrics.hpp"

namespace srm {

inline constexpr int max_manakov_degree = 12;

namespace detail {

inline std::vector<double> vandermonde_nodes(int count)
{
  std::vector<double> t{0.0};
  for (int i = 1; static_cast<int>(t.size()) < count; ++i) {
    t.push_back(i);
    if (static_cast<int>(t.size()) < count) { t.push_back(-i); }
  }
  return t;
}

inline void check_degree(int degree)
{
  if (degree > max_manakov_degree) {
    throw UnsupportedDegree(
      "Vandermonde extraction supports degree <= " + std::to_string(max_manakov_degree) + ", got "
      + std::to_string(degree));
  }
}

/**
 * Coefficients c_0..c_d of a polynomial with values[j] = p(rho * t_j),
 * t = vandermonde_nodes(d + 1). Each column of `values` is one sample
 * (so vector-valued polynomials are solved at once); column 0 is t = 0
 * and is copied through, which keeps c_0 exact.
 */
inline Matrix interpolate(const Matrix & values, double rho)
{
  const int d = static_cast<int>(values.cols()) - 1;
  check_degree(d);
  const auto t = vandermonde_nodes(d + 1);

  Matrix coeffs(values.rows(), d + 1);
  coeffs.col(0) = values.col(0);
  if (d == 0) { return coeffs; }

  // (p(t_j) - p(0)) / t_j = sum_{m=1..d} c'_m t_j^(m-1)
  Matrix v(d, d);
  Matrix rhs(d, values.rows());
  for (int j = 1; j <= d; ++j) {
    double p = 1.0;
    for (int m = 1; m <= d; ++m) {
      v(j - 1, m - 1) = p;
      p *= t[j];
    }
    rhs.row(j - 1) = ((values.col(j) - values.col(0)) / t[j]).transpose();
  }
  Eigen::PartialPivLU<Matrix> lu(v);
  if (!(lu.rcond() > 1e-15)) { throw ConditioningError("Vandermonde system is singular to working precision"); }
  const Matrix sol = lu.solve(rhs);
  double scale = 1.0;
  for (int m = 1; m <= d; ++m) {
    scale *= rho;
    coeffs.col(m) = sol.row(m - 1).transpose() / scale;
  }
  return coeffs;
}

inline double node_scale(const SkewMatrix & m, const Vector & a)
{
  const double nm = m.norm();
  const double na = a.norm();
  return (nm > 0.0 && na > 0.0) ? nm / na : 1.0;
}

inline Matrix matrix_power(const Matrix & x, int p)
{
  Matrix out = Matrix::Identity(x.rows(), x.cols());
  for (int i = 0; i < p; ++i) { out = out * x; }
  return out;
}

}  // namespace detail

/// Coefficients C_0..C_d with (M + lambda A)^d = sum_m lambda^m C_m; exact for M = 0.
inline std::vector<Matrix> lambda_matrix_coefficients(const SkewMatrix & m, const Vector & a, int d)
{
  if (d < 0) { throw InvalidArgument("lambda_matrix_coefficients: negative degree"); }
  detail::check_degree(d);
  const int n = m.n();
  if (m.max_abs() == 0.0) {
    std::vector<Matrix> out(static_cast<std::size_t>(d + 1), Matrix::Zero(n, n));
    out.back() = detail::matrix_power(Matrix(a.asDiagonal()), d);
    return out;
  }
  const double rho = detail::node_scale(m, a);
  const auto t     = detail::vandermonde_nodes(d + 1);
  Matrix samples(n * n, d + 1);
  for (int j = 0; j <= d; ++j) {
    const Matrix x = detail::matrix_power(m.mat() + (rho * t[j]) * Matrix(a.asDiagonal()), d);
    samples.col(j) = Eigen::Map<const Vector>(x.data(), n * n);
  }
  const Matrix coeffs = detail::interpolate(samples, rho);
  std::vector<Matrix> out;
  for (int p = 0; p <= d; ++p) { out.push_back(Eigen::Map<const Matrix>(coeffs.col(p).data(), n, n)); }
  return out;
}

/// Coefficients c_0..c_k with (1/k) Tr(M + lambda A)^k = sum_m lambda^m c_m; exact for M = 0.
inline std::vector<double> lambda_trace_coefficients(const SkewMatrix & m, const Vector & a, int k)
{
  if (k < 1) { throw InvalidArgument("lambda_trace_coefficients: k must be >= 1"); }
  detail::check_degree(k);
  if (m.max_abs() == 0.0) {
    std::vector<double> out(static_cast<std::size_t>(k + 1), 0.0);
    out.back() = a.array().pow(k).sum() / k;
    return out;
  }
  const double rho = detail::node_scale(m, a);
  const auto t     = detail::vandermonde_nodes(k + 1);
  Matrix samples(1, k + 1);
  for (int j = 0; j <= k; ++j) {
    samples(0, j) = detail::matrix_power(m.mat() + (rho * t[j]) * Matrix(a.asDiagonal()), k).trace() / k;
  }
  const Matrix coeffs = detail::interpolate(samples, rho);
  return {coeffs.data(), coeffs.data() + coeffs.size()};
}

/// h_k^lambda(M) = (1/k) Tr(M + lambda J_sR)^k.
inline double h_lambda(const SkewMatrix & m, const MassSpec & jsr, int k, double lambda)
{
  detail::check_dims(m, jsr, "h_lambda");
  if (k < 1) { throw InvalidArgument("h_lambda: k must be >= 1"); }
  return detail::matrix_power(m.mat() + lambda * jsr.matrix(), k).trace() / k;
}

/// h[r] = h_{k,r}(M), r = 0..k: the coefficient of lambda^(k-r).
inline std::vector<double> extract_coefficients(const SkewMatrix & m, const MassSpec & jsr, int k)
{
  detail::check_dims(m, jsr, "extract_coefficients");
  detail::require_sr(jsr, "extract_coefficients");
  const auto c = lambda_trace_coefficients(m, jsr.diag(), k);
  return {c.rbegin(), c.rend()};
}

namespace detail {

inline void check_kr(int k, int r, const char * who)
{
  if (k < 1 || r < 0 || r > k) {
    throw InvalidArgument(std::string(who) + ": need 1 <= k and 0 <= r <= k");
  }
}

inline DiffMatrix diff_coefficient(const SkewMatrix & m, const Vector & a, int k, int r)
{
  check_degree(k);
  if (r == 0) { return DiffMatrix(Matrix::Zero(m.n(), m.n())); }
  return DiffMatrix(lambda_matrix_coefficients(m, a, k - 1)[static_cast<std::size_t>(k - r)]);
}

}  // namespace detail

/**
 * Coefficient of lambda^(k-r) in (M + lambda J_sR)^(k-1). It represents
 * dh_{k,r} in the trace identification: dh_{k,r}(delta) = Tr(D delta).
 */
inline DiffMatrix diff_h(const SkewMatrix & m, const MassSpec & jsr, int k, int r)
{
  detail::check_dims(m, jsr, "diff_h");
  detail::require_sr(jsr, "diff_h");
  detail::check_kr(k, r, "diff_h");
  return detail::diff_coefficient(m, jsr.diag(), k, r);
}

/// Converts a trace-identified differential into the gradient under pairing().
inline SkewMatrix gradient_from_trace(const DiffMatrix & d) { return -2.0 * d.skew(); }

inline SkewMatrix gradient_h(const SkewMatrix & m, const MassSpec & jsr, int k, int r)
{
  return gradient_from_trace(diff_h(m, jsr, k, r));
}

/// f[r] = f_{k,r}(M), the coefficient of lambda^(k-r) in (1/k) Tr(M + lambda J^2)^k.
inline std::vector<double> riemannian_f(const SkewMatrix & m, const MassSpec & j, int k)
{
  detail::check_dims(m, j, "riemannian_f");
  detail::require_riemannian(j, "riemannian_f");
  const auto c = lambda_trace_coefficients(m, j.diag().cwiseAbs2(), k);
  return {c.rbegin(), c.rend()};
}

inline DiffMatrix diff_f(const SkewMatrix & m, const MassSpec & j, int k, int r)
{
  detail::check_dims(m, j, "diff_f");
  detail::require_riemannian(j, "diff_f");
  detail::check_kr(k, r, "diff_f");
  return detail::diff_coefficient(m, j.diag().cwiseAbs2(), k, r);
}

/// Tr(M^(2k)).
inline double casimir(const SkewMatrix & m, int k)
{
  if (k < 1) { throw InvalidArgument("casimir: k must be >= 1"); }
  return detail::matrix_power(m.mat(), 2 * k).trace();
}

/// d Tr(M^2k)(delta) = 2k Tr(M^(2k-1) delta), so the gradient is -4k M^(2k-1).
inline SkewMatrix casimir_gradient(const SkewMatrix & m, int k)
{
  return SkewMatrix::skew_part(-4.0 * k * detail::matrix_power(m.mat(), 2 * k - 1));
}

/// (1/2)(n(n-1)/2 - floor(n/2)) integrals beyond the Casimirs.
inline int expected_count(int n)
{
  if (n < 3) { throw InvalidArgument("expected_count: n must be >= 3"); }
  return (n * (n - 1) / 2 - n / 2) / 2;
}

/// sum_{k=3..n} floor((k-1)/2).
inline int count_by_degree(int n)
{
  if (n < 3) { throw InvalidArgument("count_by_degree: n must be >= 3"); }
  int c = 0;
  for (int k = 3; k <= n; ++k) { c += (k - 1) / 2; }
  return c;
}

/// l(l-1) for n = 2l, l^2 for n = 2l+1.
inline int count_by_parity(int n)
{
  if (n < 3) { throw InvalidArgument("count_by_parity: n must be >= 3"); }
  const int l = n / 2;
  return n % 2 == 0 ? l * (l - 1) : l * l;
}

struct IntegralEntry
{
  int k;
  int r;
  ScalarFunction fn;
};

/**
 * @brief The non-trivial integrals (k = 3..n, r even, 0 < r < k) and the
 * Casimirs Tr(M^2k), k = 1..floor(n/2).
 */
struct IntegralFamily
{
  int n = 0;
  MassSpec spec;
  std::vector<IntegralEntry> entries;
  std::vector<ScalarFunction> casimirs;

  /// Everything, in the order entries then casimirs.
  std::vector<ScalarFunction> functions() const
  {
    std::vector<ScalarFunction> out;
    for (const auto & e : entries) { out.push_back(e.fn); }
    out.insert(out.end(), casimirs.begin(), casimirs.end());
    return out;
  }
};

namespace detail {

inline std::vector<ScalarFunction> casimir_functions(int n)
{
  std::vector<ScalarFunction> out;
  for (int c = 1; c <= n / 2; ++c) {
    out.push_back({
      "C" + std::to_string(2 * c),
      [c](const SkewMatrix & m) { return casimir(m, c); },
      [c](const SkewMatrix & m) { return casimir_gradient(m, c); },
    });
  }
  return out;
}

}  // namespace detail

/// h_{k,r} family for J_sR.
inline IntegralFamily sub_riemannian_family(const MassSpec & jsr)
{
  detail::require_sr(jsr, "sub_riemannian_family");
  IntegralFamily fam{jsr.n(), jsr, {}, detail::casimir_functions(jsr.n())};
  for (int k = 3; k <= fam.n; ++k) {
    for (int r = 2; r < k; r += 2) {
      fam.entries.push_back({
        k,
        r,
        {
          "h_" + std::to_string(k) + "_" + std::to_string(r),
          [jsr, k, r](const SkewMatrix & m) { return extract_coefficients(m, jsr, k)[static_cast<std::size_t>(r)]; },
          [jsr, k, r](const SkewMatrix & m) { return gradient_h(m, jsr, k, r); },
        },
      });
    }
  }
  return fam;
}

/// f_{k,r} family for a Riemannian mass matrix J (uses J^2).
inline IntegralFamily riemannian_family(const MassSpec & j)
{
  detail::require_riemannian(j, "riemannian_family");
  IntegralFamily fam{j.n(), j, {}, detail::casimir_functions(j.n())};
  for (int k = 3; k <= fam.n; ++k) {
    for (int r = 2; r < k; r += 2) {
      fam.entries.push_back({
        k,
        r,
        {
          "f_" + std::to_string(k) + "_" + std::to_string(r),
          [j, k, r](const SkewMatrix & m) { return riemannian_f(m, j, k)[static_cast<std::size_t>(r)]; },
          [j, k, r](const SkewMatrix & m) { return gradient_from_trace(diff_f(m, j, k, r)); },
        },
      });
    }
  }
  return fam;
}

inline IntegralFamily integral_family(const MassSpec & spec)
{
  return spec.kind() == MassKind::sub_riemannian ? sub_riemannian_family(spec) : riemannian_family(spec);
}

}  // namespace srm
