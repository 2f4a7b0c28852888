#pragma once

/**
 * @file
 * @brief Euler vector fields M' = [M, Omega], their Lax forms and fixed-step
 * integrators with optional reconstruction of g(t) from g' = g Omega.
 */

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srm/metrics.hpp"

namespace srm {

/// [M, omega_sr(M)].
inline SkewMatrix vf_sr(const SkewMatrix & m, const MassSpec & jsr) { return bracket(m, omega_sr(m, jsr)); }

/**
 * Componentwise sub-Riemannian Euler equations:
 *
 *     M'_1j = sum_{m>=2} M_1m M_jm / I_m,
 *     M'_ij = M_1i M_1j (1/I_i - 1/I_j),   2 <= i < j.
 *
 * The second line carries the sign produced by expanding [M, Omega].
 */
inline SkewMatrix vf_sr_coordinates(const SkewMatrix & m, const MassSpec & jsr)
{
  detail::check_dims(m, jsr, "vf_sr_coordinates");
  detail::require_sr(jsr, "vf_sr_coordinates");
  const int n    = m.n();
  const auto & d = jsr.diag();
  Matrix out     = Matrix::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    double s = 0.0;
    for (int q = 1; q < n; ++q) { s += m(0, q) * m(j, q) / d[q]; }
    out(0, j) = s;
    out(j, 0) = -s;
  }
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out(i, j) = m(0, i) * m(0, j) * (1.0 / d[i] - 1.0 / d[j]);
      out(j, i) = -out(i, j);
    }
  }
  return SkewMatrix(std::move(out));
}

/// [M, omega_riemannian(M)].
inline SkewMatrix vf_riemannian(const SkewMatrix & m, const MassSpec & j)
{
  return bracket(m, omega_riemannian(m, j));
}

inline SkewMatrix vf(const SkewMatrix & m, const MassSpec & spec)
{
  return spec.kind() == MassKind::sub_riemannian ? vf_sr(m, spec) : vf_riemannian(m, spec);
}

/**
 * Max-entry norm of [M + lambda A, Omega + lambda B] - [M, Omega] with
 * (A, B) = (J_sR, Id_t) for sub-Riemannian data and (J^2, J) otherwise.
 * Zero in exact arithmetic.
 */
inline double lax_residual(const SkewMatrix & m, const MassSpec & spec, double lambda)
{
  detail::check_dims(m, spec, "lax_residual");
  const Matrix om = omega(m, spec).mat();
  Matrix a, b;
  if (spec.kind() == MassKind::sub_riemannian) {
    a = spec.matrix();
    b = identity_t(spec.n());
  } else {
    a = spec.diag().cwiseAbs2().asDiagonal();
    b = spec.matrix();
  }
  const Matrix x    = m.mat() + lambda * a;
  const Matrix y    = om + lambda * b;
  const Matrix full = x * y - y * x;
  const Matrix base = m.mat() * om - om * m.mat();
  return (full - base).cwiseAbs().maxCoeff();
}

enum class Scheme { rk4, midpoint };

inline const char * to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "midpoint"; }

struct IntegrateOptions
{
  double dt   = 1e-3;
  long steps  = 1000;
  Scheme scheme = Scheme::rk4;
  bool reconstruct = false;
  std::optional<Matrix> g0;
  double midpoint_tol   = 1e-13;
  int midpoint_max_iter = 50;
};

struct Trajectory
{
  std::vector<double> times;
  std::vector<SkewMatrix> momenta;
  /// Empty unless reconstructed.
  std::vector<Matrix> group;

  std::vector<std::string> invariant_names;
  /// invariant_log[sample][invariant]
  std::vector<std::vector<double>> invariant_log;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  bool has_group() const { return !group.empty(); }
};

/// max |g^T g - Id|.
inline double orthogonality_defect(const Matrix & g)
{
  return (g.transpose() * g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

/// Nearest orthogonal matrix (polar factor).
inline Matrix polar_orthonormalize(const Matrix & g)
{
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/**
 * @brief Fixed-step integration of M' = field(M).
 *
 * If opts.reconstruct, g is advanced by g <- g expm(dt Omega(M_mid)) with
 * M_mid the average of the step's end points, followed by a polar correction.
 */
template<typename Field, typename OmegaFn>
Trajectory integrate_field(const SkewMatrix & m0, Field && field, const IntegrateOptions & opts, OmegaFn && omega_of)
{
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) { throw InvalidArgument("integrate: dt must be positive"); }
  if (opts.steps < 1) { throw InvalidArgument("integrate: steps must be >= 1"); }

  const int n = m0.n();
  Matrix g;
  if (opts.reconstruct) {
    g = opts.g0.value_or(Matrix::Identity(n, n));
    if (g.rows() != n || g.cols() != n) { throw InvalidArgument("integrate: g0 has the wrong dimension"); }
    if (orthogonality_defect(g) > 1e-10 || g.determinant() <= 0.0) {
      throw InvalidArgument("integrate: g0 must be in SO(n)");
    }
  }

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(opts.steps) + 1);
  traj.momenta.reserve(static_cast<std::size_t>(opts.steps) + 1);
  traj.times.push_back(0.0);
  traj.momenta.push_back(m0);
  if (opts.reconstruct) { traj.group.push_back(g); }

  const double dt = opts.dt;
  SkewMatrix m    = m0;
  for (long step = 0; step < opts.steps; ++step) {
    SkewMatrix next;
    if (opts.scheme == Scheme::rk4) {
      const SkewMatrix k1 = field(m);
      const SkewMatrix k2 = field(m + (0.5 * dt) * k1);
      const SkewMatrix k3 = field(m + (0.5 * dt) * k2);
      const SkewMatrix k4 = field(m + dt * k3);
      next = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      next           = m + dt * field(m);
      bool converged = false;
      for (int it = 0; it < opts.midpoint_max_iter; ++it) {
        SkewMatrix trial = m + dt * field(0.5 * (m + next));
        const double change = (trial - next).max_abs();
        next = std::move(trial);
        if (change <= opts.midpoint_tol * std::max(1.0, next.max_abs())) {
          converged = true;
          break;
        }
      }
      if (!converged) { throw StepFailure(step, "implicit midpoint iteration did not converge"); }
    }
    if (!std::isfinite(next.max_abs())) { throw StepFailure(step, "non-finite state"); }

    if (opts.reconstruct) {
      const SkewMatrix om = omega_of(0.5 * (m + next));
      g = polar_orthonormalize(g * Matrix(dt * om.mat()).exp());
      traj.group.push_back(g);
    }
    m = std::move(next);
    traj.times.push_back(static_cast<double>(step + 1) * dt);
    traj.momenta.push_back(m);
  }
  return traj;
}

/// Integrates the Euler equations for `spec` (sub-Riemannian or Riemannian).
inline Trajectory integrate(const SkewMatrix & m0, const MassSpec & spec, const IntegrateOptions & opts)
{
  detail::check_dims(m0, spec, "integrate");
  return integrate_field(
    m0, [&spec](const SkewMatrix & m) { return vf(m, spec); }, opts,
    [&spec](const SkewMatrix & m) { return omega(m, spec); });
}

/// Fills traj.invariant_names / invariant_log with the values of fns.
inline void record_invariants(Trajectory & traj, std::span<const ScalarFunction> fns)
{
  traj.invariant_names.clear();
  for (const auto & f : fns) { traj.invariant_names.push_back(f.name); }
  traj.invariant_log.assign(traj.size(), {});
  for (std::size_t s = 0; s < traj.size(); ++s) {
    auto & row = traj.invariant_log[s];
    for (const auto & f : fns) { row.push_back(f.value(traj.momenta[s])); }
  }
}

struct DriftReport
{
  std::vector<std::string> names;
  std::vector<double> initial;
  /// max_t |f(t) - f(0)| / max(|f(0)|, floor)
  std::vector<double> max_relative_drift;

  double worst() const
  {
    return max_relative_drift.empty() ? 0.0 : *std::max_element(max_relative_drift.begin(), max_relative_drift.end());
  }
};

inline DriftReport monitor(const Trajectory & traj, std::span<const ScalarFunction> fns, double floor = 1e-14)
{
  if (traj.empty()) { throw InvalidArgument("monitor: empty trajectory"); }
  DriftReport rep;
  for (const auto & f : fns) {
    const double f0    = f.value(traj.momenta.front());
    const double denom = std::max(std::abs(f0), floor);
    double worst       = 0.0;
    for (std::size_t s = 1; s < traj.size(); ++s) {
      worst = std::max(worst, std::abs(f.value(traj.momenta[s]) - f0) / denom);
    }
    rep.names.push_back(f.name);
    rep.initial.push_back(f0);
    rep.max_relative_drift.push_back(worst);
  }
  return rep;
}

}  // namespace srm
