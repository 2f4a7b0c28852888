#pragma once

/**
 * @file
 * @brief A ball rolling on an anisotropic table: the SO(3) sub-Riemannian
 * problem with inertias I2 < I3.
 *
 * Momenta are ordered (M23, M12, M13). With H = (M12^2/I2 + M13^2/I3)/2 the
 * equations are M' = grad H x M and, on the level H = 1/2, |M|^2 = C,
 *
 *     M12 = sqrt(I2) cn(u,k),   M13 = sqrt(I3) sn(u,k),
 *     M23 = sigma sqrt(C - I2) dn(u,k),   sigma = -1,
 *     u = t sqrt((C - I2)/(I2 I3)),   k = sqrt((I3 - I2)/(C - I2)).
 *
 * The contact point moves by y' = M13/I3, z' = -M12/I2 and stays on
 *
 *     cos(z sqrt((I3-I2)/I3)) = sqrt(1-k^2) cosh(alpha - y sqrt((I3-I2)/I2))   k < 1
 *                             = exp(-y sqrt((I3-I2)/I2))                        k = 1
 *                             = sqrt(k^2-1) sinh(alpha - y sqrt((I3-I2)/I2))   k > 1
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "srm/elliptic.hpp"
#include "srm/io.hpp"
#include "srm/so_n.hpp"

namespace srm {

inline constexpr double rolling_sigma = -1.0;

struct RollingParams
{
  double i2 = 1.0;
  double i3 = 2.0;
  /// Casimir level |M|^2.
  double c = 3.0;

  void validate() const
  {
    if (!(i2 > 0.0) || !(i3 > 0.0) || !std::isfinite(i2) || !std::isfinite(i3)) {
      throw InvalidArgument("rolling: inertias must be positive");
    }
    if (!(i2 < i3)) { throw HypothesisViolated("rolling: requires I2 < I3"); }
    if (!(c > i2) || !std::isfinite(c)) { throw InvalidArgument("rolling: Casimir level must exceed I2"); }
  }

  double u_scale() const { return std::sqrt((c - i2) / (i2 * i3)); }
  EllipticModulus modulus() const { return EllipticModulus::classify(std::sqrt((i3 - i2) / (c - i2))); }
};

/// (M23, M12, M13) at time t on the level H = 1/2, |M|^2 = C.
inline Vec3 closed_form_M(double t, const RollingParams & p)
{
  p.validate();
  const auto km = p.modulus();
  const auto v  = jacobi_sn_cn_dn(t * p.u_scale(), km.regime == Regime::separatrix ? 1.0 : km.k);
  return {rolling_sigma * std::sqrt(p.c - p.i2) * v.dn, std::sqrt(p.i2) * v.cn, std::sqrt(p.i3) * v.sn};
}

/// grad H x M in the (M23, M12, M13) ordering.
inline Vec3 lie_poisson_vf3(const Vec3 & m, double i2, double i3)
{
  const Vec3 g(0.0, m[1] / i2, m[2] / i3);
  return g.cross(m);
}

inline double rolling_hamiltonian(const Vec3 & m, double i2, double i3)
{
  return 0.5 * (m[1] * m[1] / i2 + m[2] * m[2] / i3);
}

/// Period 4 K(k) / u_scale of the closed form; oscillatory regime only.
inline double rolling_period(const RollingParams & p)
{
  p.validate();
  const auto km = p.modulus();
  if (km.regime != Regime::oscillatory) { throw NotApplicable("rolling_period: only defined for k < 1"); }
  return 4.0 * complete_elliptic_k(km.k) / p.u_scale();
}

struct PathPoint
{
  double t;
  double y;
  double z;
  Vec3 m;
};

namespace detail {

inline std::pair<double, double> path_velocity(double t, const RollingParams & p)
{
  const Vec3 m = closed_form_M(t, p);
  return {m[2] / p.i3, -m[1] / p.i2};
}

}  // namespace detail

/**
 * Contact point (y, z) from (0, 0), by Simpson's rule on each step of the
 * closed-form velocity. Samples at 0, dt, 2dt, ... and t_max.
 */
inline std::vector<PathPoint> contact_path(const RollingParams & p, double t_max, double dt)
{
  p.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) { throw InvalidArgument("contact_path: dt must be positive"); }
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) { throw InvalidArgument("contact_path: t_max must be >= 0"); }

  std::vector<PathPoint> out;
  out.push_back({0.0, 0.0, 0.0, closed_form_M(0.0, p)});
  const auto steps = static_cast<long>(std::ceil(t_max / dt - 1e-9));
  double y = 0.0, z = 0.0;
  double t0 = 0.0;
  auto v0   = detail::path_velocity(0.0, p);
  for (long i = 1; i <= steps; ++i) {
    const double t1 = std::min(static_cast<double>(i) * dt, t_max);
    const double h  = t1 - t0;
    const auto vm   = detail::path_velocity(0.5 * (t0 + t1), p);
    const auto v1   = detail::path_velocity(t1, p);
    y += h / 6.0 * (v0.first + 4.0 * vm.first + v1.first);
    z += h / 6.0 * (v0.second + 4.0 * vm.second + v1.second);
    out.push_back({t1, y, z, closed_form_M(t1, p)});
    t0 = t1;
    v0 = v1;
  }
  return out;
}

/// alpha with y(0) = z(0) = 0: arccosh(1/sqrt(1-k^2)) for k < 1, arcsinh(1/sqrt(k^2-1)) for k > 1.
inline double alpha_offset(const RollingParams & p)
{
  p.validate();
  const auto km = p.modulus();
  switch (km.regime) {
    case Regime::oscillatory: return std::acosh(1.0 / std::sqrt((1.0 - km.k) * (1.0 + km.k)));
    case Regime::rotational: return std::asinh(1.0 / std::sqrt((km.k - 1.0) * (km.k + 1.0)));
    case Regime::separatrix: break;
  }
  throw NotApplicable("alpha_offset: no offset in the separatrix case k = 1");
}

/// Left minus right side of the curve equation for the regime of p.
inline double curve_residual(double y, double z, const RollingParams & p)
{
  p.validate();
  const double lhs = std::cos(z * std::sqrt((p.i3 - p.i2) / p.i3));
  const double w   = y * std::sqrt((p.i3 - p.i2) / p.i2);
  const auto km    = p.modulus();
  switch (km.regime) {
    case Regime::oscillatory:
      return lhs - std::sqrt((1.0 - km.k) * (1.0 + km.k)) * std::cosh(alpha_offset(p) - w);
    case Regime::separatrix: return lhs - std::exp(-w);
    case Regime::rotational:
      return lhs - std::sqrt((km.k - 1.0) * (km.k + 1.0)) * std::sinh(alpha_offset(p) - w);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// One polyline per named path in a fixed 800x600 viewBox; y right, z up.
inline std::string paths_to_svg(const std::vector<std::pair<std::string, std::vector<PathPoint>>> & paths)
{
  constexpr double width = 800.0, height = 600.0, margin = 20.0;
  double ymin = 0.0, ymax = 0.0, zmin = 0.0, zmax = 0.0;
  bool any = false;
  for (const auto & [name, pts] : paths) {
    for (const auto & q : pts) {
      if (!any) {
        ymin = ymax = q.y;
        zmin = zmax = q.z;
        any         = true;
      }
      ymin = std::min(ymin, q.y);
      ymax = std::max(ymax, q.y);
      zmin = std::min(zmin, q.z);
      zmax = std::max(zmax, q.z);
    }
  }
  const double span_y = std::max(ymax - ymin, 1e-12);
  const double span_z = std::max(zmax - zmin, 1e-12);
  const double scale  = std::min((width - 2 * margin) / span_y, (height - 2 * margin) / span_z);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  for (const auto & [name, pts] : paths) {
    out += "  <polyline id=\"" + name + "\" fill=\"none\" stroke=\"black\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0) { out += ' '; }
      out += io::fmt_fixed(margin + (pts[i].y - ymin) * scale, 3) + ","
             + io::fmt_fixed(height - margin - (pts[i].z - zmin) * scale, 3);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace srm
