#pragma once

/**
 * @file
 * @brief Skew matrices in so(n), the basis E_ij, the p + t splitting and the
 * invariant pairing.
 *
 * Matrix entries are addressed 0-based through mat(). Basis labels (i, j)
 * follow the usual mathematical convention and are 1-based with i < j.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "srm/errors.hpp"

namespace srm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec3   = Eigen::Vector3d;

/// 1-based label of the basis element E_ij, i < j.
struct IndexPair
{
  int i;
  int j;

  friend bool operator==(const IndexPair &, const IndexPair &) = default;
  friend auto operator<=>(const IndexPair &, const IndexPair &) = default;
};

/// Number of independent entries of so(n).
constexpr int so_dim(int n) { return n * (n - 1) / 2; }

/// Basis labels in lexicographic order. This order defines all serialization.
inline std::vector<IndexPair> basis_labels(int n)
{
  std::vector<IndexPair> out;
  out.reserve(static_cast<std::size_t>(so_dim(n)));
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) { out.push_back({i, j}); }
  }
  return out;
}

/**
 * @brief Element of so(n).
 *
 * The stored matrix is exactly antisymmetric. Construction from an arbitrary
 * matrix rejects anything that is not; use skew_part() to project instead.
 */
class SkewMatrix
{
public:
  SkewMatrix() = default;

  /// Zero element of so(n).
  explicit SkewMatrix(int n) : m_(Matrix::Zero(check_dim(n), n)) {}

  explicit SkewMatrix(Matrix m) : m_(std::move(m))
  {
    if (m_.rows() != m_.cols()) { throw InvalidArgument("SkewMatrix: matrix is not square"); }
    check_dim(static_cast<int>(m_.rows()));
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      for (Eigen::Index j = i; j < m_.cols(); ++j) {
        if (m_(i, j) != -m_(j, i)) { throw InvalidArgument("SkewMatrix: matrix is not antisymmetric"); }
      }
    }
  }

  /// (A - A^T) / 2.
  static SkewMatrix skew_part(const Matrix & a)
  {
    if (a.rows() != a.cols()) { throw InvalidArgument("skew_part: matrix is not square"); }
    return SkewMatrix(Unchecked{}, 0.5 * (a - a.transpose()));
  }

  /// Inverse of upper(): entries (i,j), i<j, in lexicographic order.
  static SkewMatrix from_upper(int n, std::span<const double> values)
  {
    if (values.size() != static_cast<std::size_t>(so_dim(check_dim(n)))) {
      throw InvalidArgument(
        "SkewMatrix::from_upper: expected " + std::to_string(so_dim(n)) + " values, got "
        + std::to_string(values.size()));
    }
    Matrix m = Matrix::Zero(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        m(i, j) = values[idx];
        m(j, i) = -values[idx];
        ++idx;
      }
    }
    return SkewMatrix(Unchecked{}, std::move(m));
  }

  std::vector<double> upper() const
  {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(so_dim(n())));
    for (int i = 0; i < n(); ++i) {
      for (int j = i + 1; j < n(); ++j) { out.push_back(m_(i, j)); }
    }
    return out;
  }

  int n() const { return static_cast<int>(m_.rows()); }
  const Matrix & mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }
  double norm() const { return m_.norm(); }

  friend SkewMatrix operator+(const SkewMatrix & a, const SkewMatrix & b)
  {
    check_same(a, b);
    return SkewMatrix(Unchecked{}, a.m_ + b.m_);
  }
  friend SkewMatrix operator-(const SkewMatrix & a, const SkewMatrix & b)
  {
    check_same(a, b);
    return SkewMatrix(Unchecked{}, a.m_ - b.m_);
  }
  friend SkewMatrix operator-(const SkewMatrix & a) { return SkewMatrix(Unchecked{}, -a.m_); }
  friend SkewMatrix operator*(double c, const SkewMatrix & a) { return SkewMatrix(Unchecked{}, c * a.m_); }
  friend SkewMatrix operator*(const SkewMatrix & a, double c) { return c * a; }

  friend bool operator==(const SkewMatrix & a, const SkewMatrix & b)
  {
    return a.n() == b.n() && a.m_ == b.m_;
  }

private:
  struct Unchecked
  {};
  SkewMatrix(Unchecked, Matrix m) : m_(std::move(m)) {}

  static int check_dim(int n)
  {
    if (n < 2) { throw InvalidArgument("so(n) requires n >= 2, got " + std::to_string(n)); }
    return n;
  }

  static void check_same(const SkewMatrix & a, const SkewMatrix & b)
  {
    if (a.n() != b.n()) { throw InvalidArgument("so(n): dimension mismatch"); }
  }

  Matrix m_;
};

/**
 * @brief Differential of a scalar function on so(n), not necessarily skew.
 *
 * Two values are equivalent iff their skew parts agree: symmetric parts pair
 * to zero with every skew matrix. Consumers take skew() when they need a
 * representative.
 */
class DiffMatrix
{
public:
  DiffMatrix() = default;
  explicit DiffMatrix(Matrix m) : m_(std::move(m))
  {
    if (m_.rows() != m_.cols()) { throw InvalidArgument("DiffMatrix: matrix is not square"); }
  }
  DiffMatrix(const SkewMatrix & s) : m_(s.mat()) {}  // NOLINT: implicit on purpose

  int n() const { return static_cast<int>(m_.rows()); }
  const Matrix & mat() const { return m_; }
  SkewMatrix skew() const { return SkewMatrix::skew_part(m_); }

private:
  Matrix m_;
};

inline bool equivalent(const DiffMatrix & a, const DiffMatrix & b, double tol = 0.0)
{
  if (a.n() != b.n()) { return false; }
  return (a.skew() - b.skew()).max_abs() <= tol;
}

/// M = p_part + t_part, with p_part carried by row/column 1.
struct Splitting
{
  SkewMatrix p_part;
  SkewMatrix t_part;
};

inline Splitting split(const SkewMatrix & m)
{
  const int n = m.n();
  Matrix p    = Matrix::Zero(n, n);
  p.row(0)    = m.mat().row(0);
  p.col(0)    = m.mat().col(0);
  Matrix t    = m.mat();
  t.row(0).setZero();
  t.col(0).setZero();
  return {SkewMatrix(std::move(p)), SkewMatrix(std::move(t))};
}

inline SkewMatrix basis_element(int n, int i, int j)
{
  if (n < 2 || i < 1 || j > n || i >= j) {
    throw InvalidArgument(
      "basis_element: need 1 <= i < j <= n, got (" + std::to_string(i) + "," + std::to_string(j)
      + ") for n=" + std::to_string(n));
  }
  Matrix m         = Matrix::Zero(n, n);
  m(i - 1, j - 1)  = 1.0;
  m(j - 1, i - 1)  = -1.0;
  return SkewMatrix(std::move(m));
}

inline SkewMatrix basis_element(int n, IndexPair ij) { return basis_element(n, ij.i, ij.j); }

/// AB - BA.
inline SkewMatrix bracket(const SkewMatrix & a, const SkewMatrix & b)
{
  if (a.n() != b.n()) { throw InvalidArgument("bracket: dimension mismatch"); }
  return SkewMatrix::skew_part(a.mat() * b.mat() - b.mat() * a.mat());
}

/// One term c * E_ab of a structure-constant expansion.
struct BasisTerm
{
  int coefficient;
  IndexPair index;

  friend bool operator==(const BasisTerm &, const BasisTerm &) = default;
};

/**
 * @brief [E_ij, E_km] expanded in the basis, in normal form.
 *
 * Uses [w_ij, w_km] = d_im w_jk + d_jk w_im - d_ik w_jm - d_jm w_ik, then
 * rewrites w_ba = -w_ab, drops w_aa and merges repeated labels. Terms are
 * sorted by label and carry nonzero coefficients only.
 */
inline std::vector<BasisTerm> structure_bracket(int n, IndexPair a, IndexPair b)
{
  auto valid = [n](IndexPair p) { return p.i >= 1 && p.j <= n && p.i < p.j; };
  if (!valid(a) || !valid(b)) { throw InvalidArgument("structure_bracket: invalid basis label"); }

  const auto [i, j] = a;
  const auto [k, m] = b;
  std::vector<BasisTerm> raw;
  auto add = [&raw](int c, int p, int q) {
    if (c == 0 || p == q) { return; }
    if (p > q) {
      std::swap(p, q);
      c = -c;
    }
    raw.push_back({c, {p, q}});
  };
  add(i == m ? 1 : 0, j, k);
  add(j == k ? 1 : 0, i, m);
  add(i == k ? -1 : 0, j, m);
  add(j == m ? -1 : 0, i, k);

  std::sort(raw.begin(), raw.end(), [](const BasisTerm & x, const BasisTerm & y) { return x.index < y.index; });
  std::vector<BasisTerm> out;
  for (const auto & t : raw) {
    if (!out.empty() && out.back().index == t.index) {
      out.back().coefficient += t.coefficient;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const BasisTerm & t) { return t.coefficient == 0; });
  return out;
}

/// Sum of coefficient * E_ab over the terms.
inline SkewMatrix expand(int n, std::span<const BasisTerm> terms)
{
  SkewMatrix out(n);
  for (const auto & t : terms) { out = out + static_cast<double>(t.coefficient) * basis_element(n, t.index); }
  return out;
}

/**
 * @brief The invariant pairing <A, B> = -1/2 Tr(AB).
 *
 * Positive definite on so(n) with <E_ij, E_km> = delta. Gradients throughout
 * the library are taken with respect to this pairing, so grad H_sR = Omega.
 */
inline double pairing(const Matrix & a, const Matrix & b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols()) { throw InvalidArgument("pairing: dimension mismatch"); }
  return -0.5 * a.cwiseProduct(b.transpose()).sum();
}

inline double pairing(const SkewMatrix & a, const SkewMatrix & b) { return pairing(a.mat(), b.mat()); }
inline double pairing(const DiffMatrix & a, const SkewMatrix & b) { return pairing(a.mat(), b.mat()); }

/// Tr(D X): the raw trace identification used by the Manakov differentials.
inline double trace_pairing(const DiffMatrix & d, const SkewMatrix & x)
{
  if (d.n() != x.n()) { throw InvalidArgument("trace_pairing: dimension mismatch"); }
  return d.mat().cwiseProduct(x.mat().transpose()).sum();
}

/// hat(v) w = v x w.
inline SkewMatrix hat3(const Vec3 & v)
{
  Matrix m(3, 3);
  m << 0.0, -v.z(), v.y(),  //
    v.z(), 0.0, -v.x(),     //
    -v.y(), v.x(), 0.0;
  return SkewMatrix(std::move(m));
}

inline Vec3 unhat3(const SkewMatrix & m)
{
  if (m.n() != 3) { throw InvalidArgument("unhat3: requires n = 3"); }
  return {m(2, 1), m(0, 2), m(1, 0)};
}

/// Entries (i<j) drawn in lexicographic order, uniform in [-scale, scale].
template<typename Rng>
SkewMatrix random_skew(int n, Rng & rng, double scale = 1.0)
{
  if (!(scale > 0.0)) { throw InvalidArgument("random_skew: scale must be positive"); }
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(static_cast<std::size_t>(so_dim(n)));
  for (auto & x : v) { x = dist(rng); }
  return SkewMatrix::from_upper(n, v);
}

inline SkewMatrix random_skew(int n, std::uint64_t seed, double scale = 1.0)
{
  std::mt19937_64 rng(seed);
  return random_skew(n, rng, scale);
}

/// CSV column names "M_1_2,M_1_3,...,M_{n-1}_n".
inline std::vector<std::string> upper_header(int n, const std::string & prefix = "M")
{
  std::vector<std::string> out;
  for (const auto & [i, j] : basis_labels(n)) {
    out.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(j));
  }
  return out;
}

}  // namespace srm
