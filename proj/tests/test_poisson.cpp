#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "srm/srm.hpp"

using namespace srm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MassSpec strict_sr(int n) { return MassSpec::sub_riemannian(oracle::range_inertias(n)); }

Matrix random_symmetric(int n, std::uint64_t seed)
{
  const SkewMatrix a = random_skew(n, seed);
  const SkewMatrix b = random_skew(n, seed + 1000);
  return a.mat() * b.mat() + b.mat() * a.mat();
}

}  // namespace

TEST_CASE("p_lp", "[poisson]")
{
  const SkewMatrix m = random_skew(5, 1);
  CHECK(p_lp(m, m).max_abs() <= 1e-15);
  CHECK(p_lp(m, DiffMatrix(random_symmetric(5, 3))).max_abs() <= 1e-15);
  CHECK(p_lp(basis_element(3, 1, 2), basis_element(3, 1, 3)) == -1.0 * basis_element(3, 2, 3));
  CHECK_THROWS_AS(p_lp(m, random_skew(4, 1)), InvalidArgument);
}

TEST_CASE("p_jsr", "[poisson]")
{
  const auto jsr = MassSpec::sub_riemannian({1.0, 2.0});
  CHECK(p_jsr(SkewMatrix(3), random_skew(3, 2), jsr).max_abs() == 0.0);

  // Running example with D = M: skew(M M J - J M M) by explicit products.
  const SkewMatrix m = SkewMatrix::from_upper(3, std::vector<double>{1.0, 1.0, 1.0});
  const Matrix mm    = oracle::naive_product(m.mat(), m.mat());
  const Matrix raw   = oracle::naive_product(mm, jsr.matrix()) - oracle::naive_product(jsr.matrix(), mm);
  const Matrix want  = 0.5 * (raw - raw.transpose());
  CHECK((p_jsr(m, m, jsr).mat() - want).cwiseAbs().maxCoeff() <= 1e-15);
  // M^2 is symmetric, so the (a,b) entry is (M^2)_ab (J_b - J_a).
  CHECK_THAT(p_jsr(m, m, jsr)(0, 1), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(p_jsr(m, m, jsr)(0, 2), WithinAbs(2.0, 1e-15));
  CHECK_THAT(p_jsr(m, m, jsr)(1, 2), WithinAbs(-1.0, 1e-15));

  // With the identity in place of J_sR the tensor reduces to p_lp.
  const SkewMatrix d = random_skew(3, 9);
  CHECK((p_diag(m, d, Vector::Ones(3)) - p_lp(m, d)).max_abs() <= 1e-15);
}

TEST_CASE("tensors ignore symmetric parts of D", "[poisson]")
{
  const auto jsr = strict_sr(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SkewMatrix m = random_skew(5, seed);
    const SkewMatrix d = random_skew(5, seed + 50);
    const Matrix s     = random_symmetric(5, seed + 100);
    const DiffMatrix ds(d.mat() + s);
    CHECK((p_lp(m, ds) - p_lp(m, d)).max_abs() <= 1e-15);
    CHECK((p_jsr(m, ds, jsr) - p_jsr(m, d, jsr)).max_abs() <= 1e-14);
  }
}

TEST_CASE("tensors are linear", "[poisson]")
{
  const auto jsr = strict_sr(4);
  const SkewMatrix m = random_skew(4, 1), a = random_skew(4, 2), b = random_skew(4, 3);
  CHECK((p_lp(m, a + 2.0 * b) - (p_lp(m, a) + 2.0 * p_lp(m, b))).max_abs() <= 1e-14);
  CHECK((p_jsr(m, a + 2.0 * b, jsr) - (p_jsr(m, a, jsr) + 2.0 * p_jsr(m, b, jsr))).max_abs() <= 1e-14);
  CHECK((p_lp(m + a, b) - (p_lp(m, b) + p_lp(a, b))).max_abs() <= 1e-14);
}

TEST_CASE("brackets of coordinate functions", "[poisson]")
{
  const int n        = 5;
  const auto jsr     = strict_sr(n);
  const SkewMatrix m = random_skew(n, 4);
  for (int j = 2; j <= n; ++j) {
    for (int q = 2; q <= n; ++q) {
      if (j == q) { continue; }
      const double got = bracket_fn(coordinate_function(n, 1, j), coordinate_function(n, 1, q), Tensor::lp, jsr)(m);
      // {F, G} = -<M, [dF, dG]> through structure constants.
      const auto terms = structure_bracket(n, {1, j}, {1, q});
      const double want = -pairing(m, expand(n, terms));
      CHECK_THAT(got, WithinAbs(want, 1e-15));
      CHECK_THAT(got, WithinAbs(m(j - 1, q - 1), 1e-15));
    }
  }
}

TEST_CASE("bracket antisymmetry, Leibniz rule and Casimirs", "[poisson]")
{
  const int n    = 4;
  const auto jsr = strict_sr(n);
  const auto fam = sub_riemannian_family(jsr);
  const ScalarFunction c2{"C2", [](const SkewMatrix & x) { return casimir(x, 1); },
                          [](const SkewMatrix & x) { return casimir_gradient(x, 1); }};
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const SkewMatrix m = random_skew(n, rng);
    const auto f       = linear_function(random_skew(n, rng));
    const auto g       = linear_function(random_skew(n, rng));
    const auto h       = linear_function(random_skew(n, rng));
    for (Tensor t : {Tensor::lp, Tensor::jsr}) {
      CHECK(std::abs(bracket_fn(f, f, t, jsr)(m)) <= 1e-14);
      CHECK(std::abs(bracket_fn(f, g, t, jsr)(m) + bracket_fn(g, f, t, jsr)(m)) <= 1e-12);

      const ScalarFunction gh{
        "gh", [&](const SkewMatrix & x) { return g.value(x) * h.value(x); },
        [&](const SkewMatrix & x) { return g.value(x) * h.gradient(x) + h.value(x) * g.gradient(x); }};
      const double lhs = bracket_fn(f, gh, t, jsr)(m);
      const double rhs = bracket_fn(f, g, t, jsr)(m) * h.value(m) + g.value(m) * bracket_fn(f, h, t, jsr)(m);
      CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
    CHECK(std::abs(bracket_fn(c2, g, Tensor::lp, jsr)(m)) <= 1e-14);
    CHECK(std::abs(bracket_fn(c2, fam.entries.front().fn, Tensor::lp, jsr)(m)) <= 1e-13);
  }
}

TEST_CASE("bi-Hamiltonian identity", "[poisson]")
{
  const auto jsr = MassSpec::sub_riemannian({1.0, 2.0});
  const auto rep = check_bihamiltonian(jsr, 1, 100);
  CHECK(rep.pass);
  CHECK(rep.trials == 100);
  CHECK(rep.trial_residuals.size() == 100);
  CHECK(rep.max_residual <= 1e-10);
  CHECK(rep.metrics.at("jsr_residual") <= 1e-10);
  CHECK(rep.metrics.at("coordinate_residual") <= 1e-10);
  CHECK(check_bihamiltonian(MassSpec::sub_riemannian({1, 2, 3, 4, 5}), 2, 100).pass);

  const SkewMatrix zero(4);
  const auto spec = strict_sr(4);
  CHECK(p_lp(zero, diff_h_sr(zero, spec)).max_abs() == 0.0);
  CHECK(p_jsr(zero, diff_f_sr(zero, spec), spec).max_abs() == 0.0);
  CHECK_THROWS_AS(check_bihamiltonian(MassSpec::riemannian({1, 2, 3}), 1, 10), InvalidArgument);
  CHECK_THROWS_AS(check_bihamiltonian(jsr, 1, 0), InvalidArgument);
}

TEST_CASE("recursion relations", "[poisson]")
{
  for (int n = 3; n <= 6; ++n) {
    const auto rep = check_recursion(strict_sr(n), 3, 20);
    CHECK(rep.pass);
    CHECK(rep.metrics.at("lp_hkk_residual") <= 1e-13);
  }
  const auto jsr     = strict_sr(4);
  const SkewMatrix m = random_skew(4, 5);
  CHECK(recursion_residual(m, jsr, 2, 2, jsr.diag()) <= 1e-9);
  CHECK(recursion_residual(SkewMatrix(4), jsr, 2, 2, jsr.diag()) == 0.0);

  // Negative control: perturb J on one side only.
  Vector perturbed = jsr.diag();
  perturbed[2] += 0.1;
  CHECK(recursion_residual(m, jsr, 2, 2, perturbed) > 1e-3);
  CHECK(recursion_residual(m, jsr, 3, 2, perturbed) > 1e-3);
}

TEST_CASE("h_kk is a Lie-Poisson Casimir", "[poisson]")
{
  const auto jsr = strict_sr(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SkewMatrix m = random_skew(6, seed);
    for (int k = 2; k <= 6; ++k) {
      const DiffMatrix d = diff_h(m, jsr, k, k);
      CHECK(p_lp(m, d).max_abs() <= 1e-13 * std::max(1.0, m.max_abs() * d.mat().cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("involution", "[poisson]")
{
  const auto jsr = MassSpec::sub_riemannian({1.0, 2.0, 3.0});
  const auto rep = check_involution(jsr, 7, 20);
  CHECK(rep.pass);
  CHECK(rep.metrics.at("pairs") == 10.0);
  REQUIRE(rep.labels.size() == 5);
  CHECK(rep.labels[0] == "h_3_2");
  CHECK(rep.labels[1] == "h_4_2");
  CHECK(rep.labels[2] == "H");
  CHECK(rep.labels[3] == "C2");
  CHECK(rep.labels[4] == "C4");
  CHECK(check_involution(MassSpec::sub_riemannian({1, 2, 3, 4}), 7, 10).pass);

  const auto again = check_involution(jsr, 7, 20);
  CHECK(again.trial_residuals == rep.trial_residuals);
  CHECK(again.table == rep.table);
  CHECK(again.max_residual == rep.max_residual);
}

TEST_CASE("Jacobi identity and compatibility", "[poisson]")
{
  for (int n = 3; n <= 6; ++n) {
    const auto rep = check_jacobi_compatibility(strict_sr(n), 11, 50);
    CHECK(rep.pass);
    CHECK(rep.metrics.at("lp_max") <= 1e-10);
    CHECK(rep.metrics.at("jsr_max") <= 1e-10);
    CHECK(rep.metrics.at("sum_max") <= 1e-10);
  }
}

TEST_CASE("linear bracket gradient", "[poisson]")
{
  const auto jsr     = strict_sr(4);
  const SkewMatrix a = random_skew(4, 1), b = random_skew(4, 2), m = random_skew(4, 3);
  for (Tensor t : {Tensor::lp, Tensor::jsr, Tensor::sum}) {
    const SkewMatrix g = linear_bracket_gradient(a, b, t, jsr);
    CHECK_THAT(pairing(g, m), WithinAbs(bracket_value(m, a, b, t, jsr), 1e-14));
  }
}

TEST_CASE("independence", "[poisson]")
{
  const auto r4 = check_independence(MassSpec::sub_riemannian({1, 2, 3}), 5, 20);
  CHECK(r4.pass);
  CHECK(r4.metrics.at("h_rank_min") == 2.0);
  CHECK(r4.metrics.at("joint_rank_min") == 4.0);
  const auto r7 = check_independence(strict_sr(7), 5, 10);
  CHECK(r7.pass);
  CHECK(r7.metrics.at("h_rank_expected") == 9.0);
  CHECK(r7.metrics.at("joint_rank_expected") == 12.0);
  CHECK(r7.metrics.at("h_rank_min") == 9.0);
  CHECK_THROWS_AS(check_independence(MassSpec::sub_riemannian({1, 1, 2}), 5, 10), HypothesisViolated);
}

TEST_CASE("numerical rank", "[poisson]")
{
  Vector a(3), b(3), c(3);
  a << 1, 0, 0;
  b << 0, 1e3, 0;
  c << 1, 1e3, 0;
  CHECK(numerical_rank({a, b}) == 2);
  CHECK(numerical_rank({a, b, c}) == 2);
  CHECK(numerical_rank({}) == 0);
}
