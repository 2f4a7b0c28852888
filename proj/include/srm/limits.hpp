#pragma once

/**
 * @file
 * @brief The Riemannian family J^s and the recovery of h_{k,r} from its
 * Manakov integrals as s -> infinity.
 *
 * (J^s)^2 - s^2 Id = 2s J_sR + J_sR^2, and s^2 Id commutes with M, so after
 * the substitution lambda = mu / (2s)
 *
 *     (1/k) Tr(M + lambda (J^s)^2)^k  ~  (1/k) Tr(M + mu B_s)^k,
 *     B_s = ((J^s)^2 - s^2 Id) / (2s) = J_sR + J_sR^2 / (2s),
 *
 * up to the removed shift. The mu^(k-r) coefficient is the scaled integral;
 * it is a polynomial in 1/s of degree k - r whose constant term is h_{k,r}.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "srm/manakov.hpp"

namespace srm {

inline MassSpec mass_family(const std::vector<double> & inertias, double s) { return MassSpec::family(inertias, s); }

namespace detail {

inline void check_positive_s(double s, const char * who)
{
  if (!(s > 0.0) || !std::isfinite(s)) { throw InvalidArgument(std::string(who) + ": s must be positive"); }
}

/// Diagonal of ((J^s)^2 - s^2 Id) / (2s), formed as (d - s)(d + s) / (2s).
inline Vector shifted_square(const MassSpec & js)
{
  const double s = js.s();
  Vector out(js.n());
  for (int a = 0; a < js.n(); ++a) {
    const double d = js.diag()[a];
    out[a]         = (d - s) * (d + s) / (2.0 * s);
  }
  return out;
}

}  // namespace detail

/// f^s_{3,2}(M) = Tr((J^s)^2 M^2).
inline double f32_family(const SkewMatrix & m, const std::vector<double> & inertias, double s)
{
  const MassSpec js = mass_family(inertias, s);
  detail::check_dims(m, js, "f32_family");
  const Matrix m2 = m.mat() * m.mat();
  return (js.diag().cwiseAbs2().asDiagonal() * m2).trace();
}

/// (f^s_{3,2}(M) - s^2 Tr(M^2)) / (2s) = Tr(J_sR M^2) + Tr(J_sR^2 M^2) / (2s).
inline double scaled_f32(const SkewMatrix & m, const std::vector<double> & inertias, double s)
{
  detail::check_positive_s(s, "scaled_f32");
  const MassSpec js = mass_family(inertias, s);
  detail::check_dims(m, js, "scaled_f32");
  const Matrix m2 = m.mat() * m.mat();
  return (detail::shifted_square(js).asDiagonal() * m2).trace();
}

/// mu^(k-r) coefficient of (1/k) Tr(M + mu B_s)^k; equals scaled_f32 for (3, 2).
inline double scaled_integral(const SkewMatrix & m, const std::vector<double> & inertias, int k, int r, double s)
{
  detail::check_positive_s(s, "scaled_integral");
  detail::check_kr(k, r, "scaled_integral");
  const MassSpec js = mass_family(inertias, s);
  detail::check_dims(m, js, "scaled_integral");
  return lambda_trace_coefficients(m, detail::shifted_square(js), k)[static_cast<std::size_t>(k - r)];
}

struct LimitSweep
{
  int k = 0;
  int r = 0;
  std::vector<double> s_values;
  std::vector<double> scaled_values;
  double target = 0.0;
  std::vector<double> abs_errors;
  /// Constant term of the least-squares fit in powers of 1/s.
  double extrapolated = 0.0;
  /// Slope of log(abs_error) against log(s) over the last half of the sweep;
  /// NaN when fewer than two non-zero errors are available there.
  double observed_rate = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// Least-squares constant term of sum_{m=0..deg} c_m x^m through (x_i, y_i).
inline double fit_constant_term(const std::vector<double> & x, const std::vector<double> & y, int deg)
{
  const auto rows = static_cast<Eigen::Index>(x.size());
  Matrix a(rows, deg + 1);
  Vector b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double p = 1.0;
    for (int m = 0; m <= deg; ++m) {
      a(i, m) = p;
      p *= x[static_cast<std::size_t>(i)];
    }
    b[i] = y[static_cast<std::size_t>(i)];
  }
  // Column equilibration; the constant column keeps unit scale.
  Vector colscale = a.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < colscale.size(); ++c) {
    if (!(colscale[c] > 0.0)) { throw ConditioningError("limit fit: degenerate s values"); }
    a.col(c) /= colscale[c];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const Vector rdiag = qr.matrixR().diagonal().cwiseAbs();
  if (!(rdiag.minCoeff() > 1e-12 * rdiag.maxCoeff())) {
    throw ConditioningError("limit fit is ill-conditioned; widen the s range");
  }
  const Vector c = qr.solve(b);
  return c[0] / colscale[0];
}

inline double loglog_slope(const std::vector<double> & s, const std::vector<double> & err)
{
  std::vector<double> lx, ly;
  for (std::size_t i = s.size() / 2; i < s.size(); ++i) {
    if (err[i] > 0.0) {
      lx.push_back(std::log(s[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (lx.size() < 2) { return std::numeric_limits<double>::quiet_NaN(); }
  const double n  = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/**
 * @brief Scaled integrals over an increasing sweep of s >= 1, compared with
 * h_{k,r}(M).
 *
 * Needs at least k + 1 values of s; fewer, or values too close together for
 * the fit, give ConditioningError.
 */
inline LimitSweep limit_sweep(
  const SkewMatrix & m, const std::vector<double> & inertias, int k, int r, const std::vector<double> & s_values)
{
  detail::check_kr(k, r, "limit_sweep");
  if (k < 2) { throw InvalidArgument("limit_sweep: k must be >= 2"); }
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (!(s_values[i] >= 1.0) || !std::isfinite(s_values[i])) { throw InvalidArgument("limit_sweep: s values must be >= 1"); }
    if (i > 0 && !(s_values[i] > s_values[i - 1])) {
      throw InvalidArgument("limit_sweep: s values must be strictly increasing");
    }
  }
  if (static_cast<int>(s_values.size()) < k + 1) {
    throw ConditioningError(
      "limit_sweep: need at least " + std::to_string(k + 1) + " s values for k = " + std::to_string(k) + ", got "
      + std::to_string(s_values.size()));
  }

  const MassSpec jsr = MassSpec::sub_riemannian(inertias);
  detail::check_dims(m, jsr, "limit_sweep");

  LimitSweep out;
  out.k        = k;
  out.r        = r;
  out.s_values = s_values;
  out.target   = extract_coefficients(m, jsr, k)[static_cast<std::size_t>(r)];
  std::vector<double> x;
  for (double s : s_values) {
    const double v = scaled_integral(m, inertias, k, r, s);
    out.scaled_values.push_back(v);
    out.abs_errors.push_back(std::abs(v - out.target));
    x.push_back(1.0 / s);
  }
  out.extrapolated  = detail::fit_constant_term(x, out.scaled_values, k - r);
  out.observed_rate = detail::loglog_slope(out.s_values, out.abs_errors);
  return out;
}

}  // namespace srm
