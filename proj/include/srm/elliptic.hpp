#pragma once

/**
 * @file
 * @brief Jacobi elliptic functions sn, cn, dn and K(k) by the
 * arithmetic-geometric mean.
 */

#include <array>
#include <cmath>
#include <numbers>

#include "srm/errors.hpp"

namespace srm {

enum class Regime { oscillatory, separatrix, rotational };

inline const char * to_string(Regime r)
{
  switch (r) {
    case Regime::oscillatory: return "oscillatory";
    case Regime::separatrix: return "separatrix";
    case Regime::rotational: return "rotational";
  }
  return "?";
}

struct EllipticModulus
{
  static constexpr double separatrix_band = 1e-12;

  double k = 0.0;
  Regime regime = Regime::oscillatory;

  static EllipticModulus classify(double k)
  {
    if (!(k >= 0.0) || !std::isfinite(k)) { throw InvalidArgument("elliptic modulus must be finite and >= 0"); }
    if (std::abs(k - 1.0) <= separatrix_band) { return {k, Regime::separatrix}; }
    return {k, k < 1.0 ? Regime::oscillatory : Regime::rotational};
  }
};

struct JacobiValues
{
  double sn;
  double cn;
  double dn;
};

namespace detail {

/// Descending Landen / AGM for 0 < k < 1.
inline JacobiValues jacobi_agm(double u, double k)
{
  constexpr int max_levels = 64;
  std::array<double, max_levels + 1> a{}, c{};
  a[0]          = 1.0;
  double b      = std::sqrt((1.0 - k) * (1.0 + k));
  c[0]          = k;
  int n         = 0;
  while (std::abs(c[n]) > 1e-16 * a[n] && n < max_levels) {
    const double an = 0.5 * (a[n] + b);
    c[n + 1]        = 0.5 * (a[n] - b);
    b               = std::sqrt(a[n] * b);
    a[n + 1]        = an;
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  double phi_prev = phi;
  for (int i = n; i > 0; --i) {
    phi_prev = phi;
    phi      = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = n > 0 ? cn / std::cos(phi_prev - phi) : 1.0;
  return {sn, cn, dn};
}

}  // namespace detail

/**
 * sn, cn, dn for any real u and k >= 0. k > 1 is reduced by
 * sn(u,k) = sn(ku,1/k)/k, cn(u,k) = dn(ku,1/k), dn(u,k) = cn(ku,1/k).
 */
inline JacobiValues jacobi_sn_cn_dn(double u, double k)
{
  if (!(k >= 0.0) || !std::isfinite(k)) { throw InvalidArgument("jacobi_sn_cn_dn: k must be finite and >= 0"); }
  if (k == 0.0) { return {std::sin(u), std::cos(u), 1.0}; }
  if (k == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }
  if (k > 1.0) {
    const auto v = detail::jacobi_agm(k * u, 1.0 / k);
    return {v.sn / k, v.dn, v.cn};
  }
  return detail::jacobi_agm(u, k);
}

/// K(k) = pi / (2 AGM(1, sqrt(1 - k^2))), 0 <= k < 1.
inline double complete_elliptic_k(double k)
{
  if (!(k >= 0.0 && k < 1.0)) { throw InvalidArgument("complete_elliptic_k: need 0 <= k < 1"); }
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b               = std::sqrt(a * b);
    a               = an;
  }
  return std::numbers::pi / (2.0 * a);
}

}  // namespace srm
