#pragma once

/**
 * @file
 * @brief The Lie-Poisson tensor, the J-tensor, their brackets and the
 * numerical verification suite.
 *
 * Tensors consume gradients under pairing() and return skew matrices:
 *
 *     P_lp(M) D = skew(M D - D M)
 *     P_J(M)  D = skew(M D J - J D M)
 *
 * and {F, G}(M) = <grad F, P(M) grad G>. Symmetric parts of D are projected
 * away, so raw trace-identified differentials may be passed as well.
 *
 * Every check reports residuals relative to the natural magnitude of its
 * inputs (floored at 1e-14), so thresholds are plain constants.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "srm/flows.hpp"
#include "srm/manakov.hpp"

namespace srm {

enum class Tensor { lp, jsr, sum };

inline const char * to_string(Tensor t)
{
  switch (t) {
    case Tensor::lp: return "lp";
    case Tensor::jsr: return "jsr";
    case Tensor::sum: return "sum";
  }
  return "?";
}

inline SkewMatrix p_lp(const SkewMatrix & m, const DiffMatrix & d)
{
  if (m.n() != d.mat().rows()) { throw InvalidArgument("p_lp: dimension mismatch"); }
  return SkewMatrix::skew_part(m.mat() * d.mat() - d.mat() * m.mat());
}

/// skew(M D diag(j) - diag(j) D M) for an arbitrary diagonal j.
inline SkewMatrix p_diag(const SkewMatrix & m, const DiffMatrix & d, const Vector & j)
{
  if (m.n() != d.mat().rows() || m.n() != j.size()) { throw InvalidArgument("p_jsr: dimension mismatch"); }
  const Matrix md = m.mat() * d.mat();
  const Matrix dm = d.mat() * m.mat();
  return SkewMatrix::skew_part(md * j.asDiagonal() - j.asDiagonal() * dm);
}

inline SkewMatrix p_jsr(const SkewMatrix & m, const DiffMatrix & d, const MassSpec & jsr)
{
  return p_diag(m, d, jsr.diag());
}

inline SkewMatrix apply_tensor(Tensor t, const SkewMatrix & m, const DiffMatrix & d, const MassSpec & spec)
{
  switch (t) {
    case Tensor::lp: return p_lp(m, d);
    case Tensor::jsr: return p_jsr(m, d, spec);
    case Tensor::sum: return p_lp(m, d) + p_jsr(m, d, spec);
  }
  return SkewMatrix(m.n());
}

/// <grad_f, P(M) grad_g>.
inline double bracket_value(
  const SkewMatrix & m, const SkewMatrix & grad_f, const SkewMatrix & grad_g, Tensor t, const MassSpec & spec)
{
  return pairing(grad_f, apply_tensor(t, m, grad_g, spec));
}

/// The scalar function M -> {F, G}(M).
inline std::function<double(const SkewMatrix &)> bracket_fn(
  const ScalarFunction & f, const ScalarFunction & g, Tensor t, const MassSpec & spec)
{
  return [f, g, t, spec](const SkewMatrix & m) { return bracket_value(m, f.gradient(m), g.gradient(m), t, spec); };
}

/// The linear function M -> <A, M>; its gradient is A.
inline ScalarFunction linear_function(const SkewMatrix & a, std::string name = "linear")
{
  return {
    std::move(name),
    [a](const SkewMatrix & m) { return pairing(a, m); },
    [a](const SkewMatrix &) { return a; },
  };
}

/// The coordinate function M -> M_ij (1-based); its gradient is E_ij.
inline ScalarFunction coordinate_function(int n, int i, int j)
{
  return linear_function(basis_element(n, i, j), "M_" + std::to_string(i) + "_" + std::to_string(j));
}

struct VerificationReport
{
  std::string check;
  int n = 0;
  std::uint64_t seed = 0;
  int trials = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Worst residual of each trial, in trial order.
  std::vector<double> trial_residuals;
  /// Additional named quantities (ranks, observational residuals, ...).
  std::map<std::string, double> metrics;
  /// Optional labelled table (involution: worst relative bracket per pair).
  std::vector<std::string> labels;
  std::vector<std::vector<double>> table;

  void finish()
  {
    max_residual = trial_residuals.empty() ? 0.0 : *std::max_element(trial_residuals.begin(), trial_residuals.end());
    pass         = max_residual <= threshold;
  }
};

namespace detail {

inline constexpr double scale_floor = 1e-14;

inline double rel(double residual, double scale) { return residual / std::max(scale, scale_floor); }

inline void check_trials(int trials)
{
  if (trials < 1) { throw InvalidArgument("verification needs trials >= 1"); }
}

inline VerificationReport start_report(std::string name, const MassSpec & spec, std::uint64_t seed, int trials, double thr)
{
  check_trials(trials);
  VerificationReport rep;
  rep.check     = std::move(name);
  rep.n         = spec.n();
  rep.seed      = seed;
  rep.trials    = trials;
  rep.threshold = thr;
  return rep;
}

inline double diag_scale(const MassSpec & spec) { return spec.diag().cwiseAbs().maxCoeff(); }

}  // namespace detail

/**
 * @brief X_sR = P_lp grad H_sR = P_J diff_f_sr, plus agreement with the
 * componentwise evaluator vf_sr_coordinates.
 */
inline VerificationReport check_bihamiltonian(const MassSpec & jsr, std::uint64_t seed, int trials)
{
  detail::require_sr(jsr, "check_bihamiltonian");
  auto rep = detail::start_report("bihamiltonian", jsr, seed, trials, 1e-10);
  std::mt19937_64 rng(seed);
  double lp_worst = 0.0, jsr_worst = 0.0, coord_worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SkewMatrix m  = random_skew(jsr.n(), rng);
    const SkewMatrix om = omega_sr(m, jsr);
    const SkewMatrix v  = vf_sr(m, jsr);
    const DiffMatrix df = diff_f_sr(m, jsr);

    const double scale_lp  = m.max_abs() * om.max_abs();
    const double scale_jsr = m.max_abs() * df.mat().cwiseAbs().maxCoeff() * detail::diag_scale(jsr);
    const double r_lp      = detail::rel((p_lp(m, diff_h_sr(m, jsr)) - v).max_abs(), scale_lp);
    const double r_jsr     = detail::rel((p_jsr(m, df, jsr) - v).max_abs(), std::max(scale_jsr, scale_lp));
    const double r_coord   = detail::rel((vf_sr_coordinates(m, jsr) - v).max_abs(), scale_lp);
    lp_worst    = std::max(lp_worst, r_lp);
    jsr_worst   = std::max(jsr_worst, r_jsr);
    coord_worst = std::max(coord_worst, r_coord);
    rep.trial_residuals.push_back(std::max({r_lp, r_jsr, r_coord}));
  }
  rep.metrics["lp_residual"]          = lp_worst;
  rep.metrics["jsr_residual"]         = jsr_worst;
  rep.metrics["coordinate_residual"]  = coord_worst;
  rep.finish();
  return rep;
}

/**
 * Relative residual of P_lp dh_{k+1,r} = P_J dh_{k,r} at M, where dh is
 * built from `jsr` and P_J uses the diagonal `j_tensor`. Passing a
 * diagonal other than jsr.diag() gives a negative control.
 */
inline double recursion_residual(const SkewMatrix & m, const MassSpec & jsr, int k, int r, const Vector & j_tensor)
{
  const DiffMatrix upper = diff_h(m, jsr, k + 1, r);
  const DiffMatrix lower = diff_h(m, jsr, k, r);
  const SkewMatrix lhs   = p_lp(m, upper);
  const SkewMatrix rhs   = p_diag(m, lower, j_tensor);
  const double scale     = std::max(
    m.max_abs() * upper.mat().cwiseAbs().maxCoeff(),
    m.max_abs() * lower.mat().cwiseAbs().maxCoeff() * j_tensor.cwiseAbs().maxCoeff());
  return detail::rel((lhs - rhs).max_abs(), scale);
}

/**
 * @brief P_lp dh_{k+1,r} = P_J dh_{k,r} for 1 <= r <= k, k + 1 <= n.
 *
 * Also records, without asserting, P_lp dh_{k,k} (zero: [M, M^(k-1)] = 0)
 * and P_J dh_{k,k} (observational) as metrics.
 */
inline VerificationReport check_recursion(const MassSpec & jsr, std::uint64_t seed, int trials)
{
  detail::require_sr(jsr, "check_recursion");
  auto rep = detail::start_report("recursion", jsr, seed, trials, 1e-9);
  std::mt19937_64 rng(seed);
  const int n = jsr.n();
  double lp_kk = 0.0, jsr_kk = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SkewMatrix m = random_skew(n, rng);
    double worst       = 0.0;
    for (int k = 1; k + 1 <= n; ++k) {
      for (int r = 1; r <= k; ++r) { worst = std::max(worst, recursion_residual(m, jsr, k, r, jsr.diag())); }
    }
    for (int k = 2; k <= n; ++k) {
      const DiffMatrix d = diff_h(m, jsr, k, k);
      const double dm    = d.mat().cwiseAbs().maxCoeff();
      lp_kk  = std::max(lp_kk, detail::rel(p_lp(m, d).max_abs(), m.max_abs() * dm));
      jsr_kk = std::max(jsr_kk, detail::rel(p_jsr(m, d, jsr).max_abs(), m.max_abs() * dm * detail::diag_scale(jsr)));
    }
    rep.trial_residuals.push_back(worst);
  }
  rep.metrics["lp_hkk_residual"]     = lp_kk;
  rep.metrics["jsr_hkk_observation"] = jsr_kk;
  rep.finish();
  return rep;
}

/// Integrals, H_sR and Casimirs in the order used by check_involution.
inline std::vector<ScalarFunction> involution_functions(const MassSpec & jsr)
{
  const IntegralFamily fam = sub_riemannian_family(jsr);
  std::vector<ScalarFunction> fns;
  for (const auto & e : fam.entries) { fns.push_back(e.fn); }
  fns.push_back(hamiltonian_function(jsr));
  fns.insert(fns.end(), fam.casimirs.begin(), fam.casimirs.end());
  return fns;
}

/**
 * @brief Pairwise brackets of integrals, H_sR and Casimirs under P_lp and
 * P_J. `table` holds the worst relative value per pair over both tensors.
 */
inline VerificationReport check_involution(const MassSpec & jsr, std::uint64_t seed, int trials)
{
  detail::require_sr(jsr, "check_involution");
  auto rep = detail::start_report("involution", jsr, seed, trials, 1e-9);
  const auto fns = involution_functions(jsr);
  const auto nf  = fns.size();
  for (const auto & f : fns) { rep.labels.push_back(f.name); }
  rep.table.assign(nf, std::vector<double>(nf, 0.0));

  std::mt19937_64 rng(seed);
  const double jscale = detail::diag_scale(jsr);
  double lp_worst = 0.0, jsr_worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SkewMatrix m = random_skew(jsr.n(), rng);
    std::vector<SkewMatrix> grads;
    for (const auto & f : fns) { grads.push_back(f.gradient(m)); }
    double worst = 0.0;
    for (std::size_t a = 0; a < nf; ++a) {
      for (std::size_t b = a + 1; b < nf; ++b) {
        const double base = grads[a].max_abs() * grads[b].max_abs() * m.max_abs();
        const double r_lp = detail::rel(std::abs(bracket_value(m, grads[a], grads[b], Tensor::lp, jsr)), base);
        const double r_j  = detail::rel(std::abs(bracket_value(m, grads[a], grads[b], Tensor::jsr, jsr)), base * jscale);
        const double r    = std::max(r_lp, r_j);
        lp_worst  = std::max(lp_worst, r_lp);
        jsr_worst = std::max(jsr_worst, r_j);
        rep.table[a][b] = rep.table[b][a] = std::max(rep.table[a][b], r);
        worst = std::max(worst, r);
      }
    }
    rep.trial_residuals.push_back(worst);
  }
  rep.metrics["lp_max"]  = lp_worst;
  rep.metrics["jsr_max"] = jsr_worst;
  rep.metrics["pairs"]   = static_cast<double>(nf * (nf - 1) / 2);
  rep.finish();
  return rep;
}

/**
 * Gradient of M -> {F_A, F_B}(M) for linear F_A, F_B: the bracket is linear
 * in M, so its gradient is read off the orthonormal basis E_ij.
 */
inline SkewMatrix linear_bracket_gradient(const SkewMatrix & a, const SkewMatrix & b, Tensor t, const MassSpec & spec)
{
  const int n = a.n();
  Matrix g    = Matrix::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double c = bracket_value(basis_element(n, i, j), a, b, t, spec);
      g(i - 1, j - 1) = c;
      g(j - 1, i - 1) = -c;
    }
  }
  return SkewMatrix(std::move(g));
}

/// {F_A, {F_B, F_C}} + cyclic, evaluated at M.
inline double jacobi_sum(
  const SkewMatrix & m, const SkewMatrix & a, const SkewMatrix & b, const SkewMatrix & c, Tensor t, const MassSpec & spec)
{
  return bracket_value(m, a, linear_bracket_gradient(b, c, t, spec), t, spec)
         + bracket_value(m, b, linear_bracket_gradient(c, a, t, spec), t, spec)
         + bracket_value(m, c, linear_bracket_gradient(a, b, t, spec), t, spec);
}

/// Jacobi identity for P_lp, P_J and P_lp + P_J on random linear functionals.
inline VerificationReport check_jacobi_compatibility(const MassSpec & spec, std::uint64_t seed, int trials)
{
  auto rep = detail::start_report("jacobi", spec, seed, trials, 1e-10);
  std::mt19937_64 rng(seed);
  const int n         = spec.n();
  const double jscale = 1.0 + detail::diag_scale(spec);
  double worst_by[3]  = {0.0, 0.0, 0.0};
  for (int t = 0; t < trials; ++t) {
    const SkewMatrix m = random_skew(n, rng);
    const SkewMatrix a = random_skew(n, rng);
    const SkewMatrix b = random_skew(n, rng);
    const SkewMatrix c = random_skew(n, rng);
    const double base  = m.max_abs() * a.max_abs() * b.max_abs() * c.max_abs() * jscale * jscale;
    double worst       = 0.0;
    int idx            = 0;
    for (Tensor tensor : {Tensor::lp, Tensor::jsr, Tensor::sum}) {
      const double r = detail::rel(std::abs(jacobi_sum(m, a, b, c, tensor, spec)), base);
      worst_by[idx]  = std::max(worst_by[idx], r);
      worst          = std::max(worst, r);
      ++idx;
    }
    rep.trial_residuals.push_back(worst);
  }
  rep.metrics["lp_max"]  = worst_by[0];
  rep.metrics["jsr_max"] = worst_by[1];
  rep.metrics["sum_max"] = worst_by[2];
  rep.finish();
  return rep;
}

/// Numerical rank: singular values above rel_tol * sigma_max, rows normalized first.
inline int numerical_rank(const std::vector<Vector> & rows, double rel_tol = 1e-8)
{
  if (rows.empty()) { return 0; }
  Matrix a(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double nr = rows[i].norm();
    const Vector r = nr > 0.0 ? Vector(rows[i] / nr) : rows[i];
    a.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) { return 0; }
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) { ++rank; }
  }
  return rank;
}

/**
 * @brief Rank of the integral differentials, alone and with the Casimirs.
 *
 * A trial passes when the ranks equal expected_count(n) and
 * expected_count(n) + floor(n/2). The report's residual is the fraction of
 * failing trials and the threshold is 0.1.
 */
inline VerificationReport check_independence(const MassSpec & jsr, std::uint64_t seed, int trials)
{
  detail::require_sr(jsr, "check_independence");
  if (!jsr.strict()) { throw HypothesisViolated("independence requires strictly increasing inertias I_2 < ... < I_n"); }
  const int n = jsr.n();
  if (n < 3) { throw InvalidArgument("check_independence: n must be >= 3"); }
  auto rep = detail::start_report("independence", jsr, seed, trials, 0.1);

  const IntegralFamily fam = sub_riemannian_family(jsr);
  const int want_h         = expected_count(n);
  const int want_joint     = want_h + n / 2;
  int failures = 0, min_h = want_h, min_joint = want_joint;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const SkewMatrix m = random_skew(n, rng);
    std::vector<Vector> rows;
    auto vec = [](const SkewMatrix & g) {
      const auto u = g.upper();
      return Vector(Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size())));
    };
    for (const auto & e : fam.entries) { rows.push_back(vec(e.fn.gradient(m))); }
    const int h_rank = numerical_rank(rows);
    for (const auto & c : fam.casimirs) { rows.push_back(vec(c.gradient(m))); }
    const int joint_rank = numerical_rank(rows);
    min_h     = std::min(min_h, h_rank);
    min_joint = std::min(min_joint, joint_rank);
    const bool ok = h_rank == want_h && joint_rank == want_joint;
    if (!ok) { ++failures; }
    rep.trial_residuals.push_back(ok ? 0.0 : 1.0);
  }
  rep.metrics["h_rank_expected"]     = want_h;
  rep.metrics["joint_rank_expected"] = want_joint;
  rep.metrics["h_rank_min"]          = min_h;
  rep.metrics["joint_rank_min"]      = min_joint;
  rep.metrics["failing_trials"]      = failures;
  rep.finish();
  rep.max_residual = static_cast<double>(failures) / trials;
  rep.pass         = rep.max_residual <= rep.threshold;
  return rep;
}

}  // namespace srm
