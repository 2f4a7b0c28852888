#pragma once

/**
 * @file
 * @brief Mass matrices, the momentum to velocity maps and the Hamiltonians
 * H, H_sR and F_sR.
 *
 * Three kinds of inertia data are supported:
 *  - riemannian:     J = Diag(J_1, ..., J_n) with J_i + J_j > 0,
 *  - sub_riemannian: J_sR = Diag(0, I_2, ..., I_n) with 0 < I_2 <= ... <= I_n,
 *  - family:         J^s = Diag(-s, I_2 + s, ..., I_n + s), a Riemannian mass
 *                    matrix whose s -> infinity limit is the sub-Riemannian one.
 */

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "srm/so_n.hpp"

namespace srm {

enum class MassKind { riemannian, sub_riemannian, family };

inline const char * to_string(MassKind k)
{
  switch (k) {
    case MassKind::riemannian: return "riemannian";
    case MassKind::sub_riemannian: return "sub_riemannian";
    case MassKind::family: return "family";
  }
  return "?";
}

class MassSpec
{
public:
  static MassSpec riemannian(std::vector<double> j)
  {
    const int n = static_cast<int>(j.size());
    if (n < 2) { throw InvalidArgument("mass matrix needs n >= 2 entries"); }
    for (int a = 0; a < n; ++a) {
      if (!std::isfinite(j[a])) { throw InvalidArgument("mass matrix entries must be finite"); }
      for (int b = a + 1; b < n; ++b) {
        if (!(j[a] + j[b] > 0.0)) {
          throw InvalidArgument(
            "mass matrix needs J_i + J_j > 0, violated at (" + std::to_string(a + 1) + ","
            + std::to_string(b + 1) + ")");
        }
      }
    }
    MassSpec out;
    out.kind_ = MassKind::riemannian;
    out.diag_ = Eigen::Map<const Vector>(j.data(), n);
    return out;
  }

  /// Inertias I_2, ..., I_n.
  static MassSpec sub_riemannian(std::vector<double> inertias)
  {
    check_inertias(inertias);
    MassSpec out;
    out.kind_     = MassKind::sub_riemannian;
    out.inertias_ = std::move(inertias);
    out.diag_     = Vector::Zero(static_cast<Eigen::Index>(out.inertias_.size()) + 1);
    for (std::size_t a = 0; a < out.inertias_.size(); ++a) { out.diag_[static_cast<Eigen::Index>(a) + 1] = out.inertias_[a]; }
    return out;
  }

  static MassSpec family(std::vector<double> inertias, double s)
  {
    if (!(s >= 0.0) || !std::isfinite(s)) { throw InvalidArgument("mass family needs s >= 0"); }
    check_inertias(inertias);
    MassSpec out;
    out.kind_     = MassKind::family;
    out.s_        = s;
    out.inertias_ = std::move(inertias);
    out.diag_     = Vector::Zero(static_cast<Eigen::Index>(out.inertias_.size()) + 1);
    out.diag_[0]  = -s;
    for (std::size_t a = 0; a < out.inertias_.size(); ++a) {
      out.diag_[static_cast<Eigen::Index>(a) + 1] = out.inertias_[a] + s;
    }
    return out;
  }

  MassKind kind() const { return kind_; }
  int n() const { return static_cast<int>(diag_.size()); }

  /// The diagonal of J, J_sR or J^s.
  const Vector & diag() const { return diag_; }
  Matrix matrix() const { return diag_.asDiagonal(); }

  /// I_2..I_n; empty for riemannian.
  const std::vector<double> & inertias() const { return inertias_; }

  /// I_j for 2 <= j <= n (1-based).
  double inertia(int j) const { return inertias_.at(static_cast<std::size_t>(j - 2)); }

  double s() const { return s_; }

  bool is_riemannian_valid() const { return kind_ != MassKind::sub_riemannian; }

  /// 0 < I_2 < ... < I_n.
  bool strict() const
  {
    for (std::size_t a = 1; a < inertias_.size(); ++a) {
      if (!(inertias_[a - 1] < inertias_[a])) { return false; }
    }
    return !inertias_.empty();
  }

  MassSpec sub_riemannian_limit() const
  {
    if (kind_ == MassKind::riemannian) { throw InvalidArgument("sub_riemannian_limit: not a family"); }
    return sub_riemannian(inertias_);
  }

private:
  static void check_inertias(const std::vector<double> & v)
  {
    if (v.empty()) { throw InvalidArgument("sub-Riemannian inertias need n >= 2"); }
    for (std::size_t a = 0; a < v.size(); ++a) {
      if (!(v[a] > 0.0) || !std::isfinite(v[a])) { throw InvalidArgument("inertias must be positive"); }
      if (a > 0 && v[a] < v[a - 1]) { throw InvalidArgument("inertias must be non-decreasing (I_2 <= ... <= I_n)"); }
    }
  }

  MassKind kind_ = MassKind::riemannian;
  Vector diag_;
  std::vector<double> inertias_;
  double s_ = 0.0;
};

namespace detail {

inline void check_dims(const SkewMatrix & m, const MassSpec & spec, const char * who)
{
  if (m.n() != spec.n()) {
    throw InvalidArgument(
      std::string(who) + ": dimension mismatch (M is " + std::to_string(m.n()) + ", inertia is "
      + std::to_string(spec.n()) + ")");
  }
}

inline void require_sr(const MassSpec & spec, const char * who)
{
  if (spec.kind() != MassKind::sub_riemannian) {
    throw InvalidArgument(std::string(who) + ": requires sub-Riemannian inertia");
  }
}

inline void require_riemannian(const MassSpec & spec, const char * who)
{
  if (!spec.is_riemannian_valid()) { throw InvalidArgument(std::string(who) + ": requires a Riemannian mass matrix"); }
}

/// Moore-Penrose inverse of a diagonal with exact zeros kept at zero.
inline Vector pinv_diag(const Vector & d, int power = 1)
{
  Vector out(d.size());
  for (Eigen::Index a = 0; a < d.size(); ++a) { out[a] = d[a] == 0.0 ? 0.0 : std::pow(d[a], -power); }
  return out;
}

}  // namespace detail

/// Id_t = Diag(0, 1, ..., 1).
inline Matrix identity_t(int n)
{
  Matrix m  = Matrix::Identity(n, n);
  m(0, 0)   = 0.0;
  return m;
}

/// Omega solving Omega J + J Omega = M.
inline SkewMatrix omega_riemannian(const SkewMatrix & m, const MassSpec & j)
{
  detail::check_dims(m, j, "omega_riemannian");
  detail::require_riemannian(j, "omega_riemannian");
  const int n = m.n();
  const auto & d = j.diag();
  Matrix out = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      out(a, b) = m(a, b) / (d[a] + d[b]);
      out(b, a) = -out(a, b);
    }
  }
  return SkewMatrix(std::move(out));
}

/// The unique Omega in p with J_sR Omega + Omega J_sR = M_p: Omega_1j = M_1j / I_j.
inline SkewMatrix omega_sr(const SkewMatrix & m, const MassSpec & jsr)
{
  detail::check_dims(m, jsr, "omega_sr");
  detail::require_sr(jsr, "omega_sr");
  const int n = m.n();
  Matrix out = Matrix::Zero(n, n);
  for (int b = 1; b < n; ++b) {
    out(0, b) = m(0, b) / jsr.diag()[b];
    out(b, 0) = -out(0, b);
  }
  return SkewMatrix(std::move(out));
}

inline SkewMatrix omega(const SkewMatrix & m, const MassSpec & spec)
{
  return spec.kind() == MassKind::sub_riemannian ? omega_sr(m, spec) : omega_riemannian(m, spec);
}

/// H_sR = -1/4 Tr(M Omega).
inline double hamiltonian_sr(const SkewMatrix & m, const MassSpec & jsr)
{
  return -0.25 * (m.mat() * omega_sr(m, jsr).mat()).trace();
}

/// H_sR = 1/2 (M_12^2 / I_2 + ... + M_1n^2 / I_n).
inline double hamiltonian_sr_coordinates(const SkewMatrix & m, const MassSpec & jsr)
{
  detail::check_dims(m, jsr, "hamiltonian_sr_coordinates");
  detail::require_sr(jsr, "hamiltonian_sr_coordinates");
  double h = 0.0;
  for (int b = 1; b < m.n(); ++b) { h += m(0, b) * m(0, b) / jsr.diag()[b]; }
  return 0.5 * h;
}

/// H = -1/4 Tr(M Omega) = 1/2 sum_{i<j} M_ij^2 / (J_i + J_j).
inline double hamiltonian_riemannian(const SkewMatrix & m, const MassSpec & j)
{
  return -0.25 * (m.mat() * omega_riemannian(m, j).mat()).trace();
}

inline double hamiltonian(const SkewMatrix & m, const MassSpec & spec)
{
  return spec.kind() == MassKind::sub_riemannian ? hamiltonian_sr(m, spec) : hamiltonian_riemannian(m, spec);
}

/// F_sR = -1/2 Tr(2 M_p J^-2 M_p - J^-1 M_t J^-1 M_t), J^-1 the pseudo-inverse of J_sR.
inline double f_sr(const SkewMatrix & m, const MassSpec & jsr)
{
  detail::check_dims(m, jsr, "f_sr");
  detail::require_sr(jsr, "f_sr");
  const auto [mp, mt] = split(m);
  const Vector inv1   = detail::pinv_diag(jsr.diag(), 1);
  const Vector inv2   = detail::pinv_diag(jsr.diag(), 2);
  const Matrix pp     = 2.0 * mp.mat() * inv2.asDiagonal() * mp.mat();
  const Matrix tt     = inv1.asDiagonal() * mt.mat() * inv1.asDiagonal() * mt.mat();
  return -0.5 * (pp - tt).trace();
}

/**
 * @brief J^-2 M_p + M_p J^-2 - J^-1 M_t J^-1.
 *
 * This matrix satisfies P_J(diff_f_sr) = [M, Omega] exactly. It is skew and
 * is the gradient of F_sR / 2 under the pairing, i.e.
 * dF_sR(delta) = 2 <diff_f_sr(M), delta>.
 */
inline DiffMatrix diff_f_sr(const SkewMatrix & m, const MassSpec & jsr)
{
  detail::check_dims(m, jsr, "diff_f_sr");
  detail::require_sr(jsr, "diff_f_sr");
  const auto [mp, mt] = split(m);
  const Vector inv1   = detail::pinv_diag(jsr.diag(), 1);
  const Vector inv2   = detail::pinv_diag(jsr.diag(), 2);
  Matrix d            = inv2.asDiagonal() * mp.mat();
  d += mp.mat() * inv2.asDiagonal();
  d -= inv1.asDiagonal() * mt.mat() * inv1.asDiagonal();
  return DiffMatrix(std::move(d));
}

/// grad H_sR = Omega.
inline DiffMatrix diff_h_sr(const SkewMatrix & m, const MassSpec & jsr) { return omega_sr(m, jsr); }

/// A scalar function on so(n) with its gradient under pairing().
struct ScalarFunction
{
  std::string name;
  std::function<double(const SkewMatrix &)> value;
  std::function<SkewMatrix(const SkewMatrix &)> gradient;
};

inline ScalarFunction hamiltonian_function(const MassSpec & spec)
{
  return {
    "H",
    [spec](const SkewMatrix & m) { return hamiltonian(m, spec); },
    [spec](const SkewMatrix & m) { return omega(m, spec); },
  };
}

}  // namespace srm
