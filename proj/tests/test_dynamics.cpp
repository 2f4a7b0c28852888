#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "srm/srm.hpp"

using namespace srm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SkewMatrix running_example() { return SkewMatrix::from_upper(3, std::vector<double>{1.0, 1.0, 1.0}); }

MassSpec strict_sr(int n) { return MassSpec::sub_riemannian(oracle::range_inertias(n)); }

MassSpec random_strict_sr(int n, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(0.3, 5.0);
  std::vector<double> in(static_cast<std::size_t>(n - 1));
  for (auto & x : in) { x = u(rng); }
  std::sort(in.begin(), in.end());
  return MassSpec::sub_riemannian(in);
}

}  // namespace

// ---------------------------------------------------------------- flows

TEST_CASE("vf_sr on the running example", "[flows]")
{
  const auto jsr    = MassSpec::sub_riemannian({1.0, 2.0});
  const auto v      = vf_sr(running_example(), jsr).upper();
  CHECK_THAT(v[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(v[1], WithinAbs(-1.0, 1e-15));
  CHECK_THAT(v[2], WithinAbs(0.5, 1e-15));
}

TEST_CASE("coordinate evaluator matches the commutator", "[flows]")
{
  std::mt19937_64 rng(12);
  for (int n = 3; n <= 8; ++n) {
    const auto jsr = random_strict_sr(n, rng);
    for (int t = 0; t < 50; ++t) {
      const SkewMatrix m = random_skew(n, rng);
      CHECK((vf_sr_coordinates(m, jsr) - vf_sr(m, jsr)).max_abs() <= 1e-14 * (1.0 + vf_sr(m, jsr).max_abs()));
    }
  }
}

TEST_CASE("equilibria of vf_sr", "[flows]")
{
  const auto jsr = MassSpec::sub_riemannian({1.0, 2.0});
  CHECK(vf_sr(basis_element(3, 1, 2), jsr).max_abs() == 0.0);
  CHECK(vf_sr(basis_element(3, 2, 3), jsr).max_abs() == 0.0);
  // M in p with M_13 = 0: only the (1,3) entry may move.
  const SkewMatrix m = SkewMatrix::from_upper(3, std::vector<double>{0.8, 0.0, 0.3});
  const auto v       = vf_sr(m, jsr).upper();
  CHECK(v[0] == 0.0);
  CHECK(v[2] == 0.0);
}

TEST_CASE("vf_sr sends p into t", "[flows]")
{
  const auto jsr     = strict_sr(6);
  const SkewMatrix m = split(random_skew(6, 77)).p_part;
  const SkewMatrix v = vf_sr(m, jsr);
  CHECK(split(v).p_part.max_abs() == 0.0);
  CHECK(split(v).t_part.max_abs() > 0.0);
}

TEST_CASE("H_sR and Casimirs are conserved pointwise", "[flows]")
{
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n        = 3 + trial % 6;
    const auto jsr     = random_strict_sr(n, rng);
    const SkewMatrix m = random_skew(n, rng);
    const SkewMatrix v = vf_sr(m, jsr);
    const double scale = m.max_abs() * v.max_abs();
    CHECK(std::abs(pairing(omega_sr(m, jsr), v)) <= 1e-12 * scale);
    Matrix p = m.mat();
    for (int k = 1; k <= n / 2; ++k) {
      CHECK(std::abs((p * v.mat()).trace()) <= 1e-12 * scale * std::pow(m.mat().norm(), 2 * k - 2) * n);
      p = p * m.mat() * m.mat();
    }
  }
}

TEST_CASE("vf_riemannian", "[flows]")
{
  const SkewMatrix m = random_skew(4, 8);
  CHECK(vf_riemannian(m, MassSpec::riemannian({2, 2, 2, 2})).max_abs() <= 1e-15);
  CHECK(vf_riemannian(SkewMatrix(4), MassSpec::riemannian({1, 2, 3, 4})).max_abs() == 0.0);

  // Free rigid body: m' = m x omega in the hat-map picture.
  const auto j        = MassSpec::riemannian({1, 2, 3});
  const SkewMatrix e  = basis_element(3, 1, 2) + basis_element(3, 1, 3);
  const Vec3 mv       = unhat3(e);
  const Vec3 om       = unhat3(omega_riemannian(e, j));
  const Vec3 expected = mv.cross(om);
  CHECK((unhat3(vf_riemannian(e, j)) - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Lax residual vanishes", "[flows]")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n        = 3 + trial % 6;
    const auto jsr     = random_strict_sr(n, rng);
    const SkewMatrix m = random_skew(n, rng);
    const double l     = lam(rng);
    const double tol   = 1e-12 * (1.0 + m.max_abs()) * (1.0 + std::abs(l)) * jsr.diag().maxCoeff();
    CHECK(lax_residual(m, jsr, l) <= tol);
    CHECK(lax_residual(m, jsr, 0.0) == 0.0);
    const auto fam = MassSpec::family(jsr.inertias(), 2.5);
    CHECK(lax_residual(m, fam, l) <= tol * 50.0);
  }
}

TEST_CASE("integrate validates its options", "[flows]")
{
  const auto jsr     = strict_sr(3);
  const SkewMatrix m = running_example();
  IntegrateOptions o;
  o.steps = 0;
  CHECK_THROWS_AS(integrate(m, jsr, o), InvalidArgument);
  o.steps = 10;
  o.dt    = 0.0;
  CHECK_THROWS_AS(integrate(m, jsr, o), InvalidArgument);
  o.dt          = 1e-3;
  o.reconstruct = true;
  o.g0          = Matrix::Identity(3, 3) * 1.1;
  CHECK_THROWS_AS(integrate(m, jsr, o), InvalidArgument);
  Matrix refl   = Matrix::Identity(3, 3);
  refl(0, 0)    = -1.0;
  o.g0          = refl;
  CHECK_THROWS_AS(integrate(m, jsr, o), InvalidArgument);
  o.g0 = Matrix::Identity(4, 4);
  CHECK_THROWS_AS(integrate(m, jsr, o), InvalidArgument);
  CHECK_THROWS_AS(integrate(random_skew(4, 1), jsr, IntegrateOptions{}), InvalidArgument);
}

TEST_CASE("an equilibrium gives a constant trajectory", "[flows]")
{
  const auto jsr = strict_sr(3);
  IntegrateOptions o;
  o.steps         = 100;
  const auto traj = integrate(basis_element(3, 1, 2), jsr, o);
  REQUIRE(traj.size() == 101);
  for (const auto & m : traj.momenta) { CHECK(m == basis_element(3, 1, 2)); }
  const std::vector<ScalarFunction> fns{hamiltonian_function(jsr)};
  CHECK(monitor(traj, fns).worst() == 0.0);
  for (std::size_t i = 1; i < traj.size(); ++i) { CHECK(traj.times[i] > traj.times[i - 1]); }
}

TEST_CASE("RK4 conserves H_sR", "[flows]")
{
  const auto jsr = MassSpec::sub_riemannian({1.0, 2.0});
  IntegrateOptions o;
  o.dt            = 1e-3;
  o.steps         = 10000;
  const auto traj = integrate(random_skew(3, 7), jsr, o);
  const std::vector<ScalarFunction> fns{hamiltonian_function(jsr)};
  CHECK(monitor(traj, fns).worst() <= 1e-9);
}

TEST_CASE("RK4 is fourth order", "[flows]")
{
  const auto jsr     = strict_sr(4);
  const SkewMatrix m = random_skew(4, 31, 2.0);
  auto endpoint      = [&](double dt) {
    IntegrateOptions o;
    o.dt    = dt;
    o.steps = std::lround(2.0 / dt);
    return integrate(m, jsr, o).momenta.back();
  };
  const SkewMatrix ref = endpoint(1e-3);
  const double e1      = (endpoint(0.04) - ref).max_abs();
  const double e2      = (endpoint(0.02) - ref).max_abs();
  CHECK(e1 / e2 > 13.0);
  CHECK(e1 / e2 < 19.0);
}

TEST_CASE("implicit midpoint conserves Tr(M^2)", "[flows]")
{
  for (int n = 3; n <= 6; ++n) {
    const auto jsr = strict_sr(n);
    IntegrateOptions o;
    o.dt            = 1e-2;
    o.steps         = 1000;
    o.scheme        = Scheme::midpoint;
    const auto traj = integrate(random_skew(n, 100 + n), jsr, o);
    const std::vector<ScalarFunction> fns{{"C2", [](const SkewMatrix & x) { return casimir(x, 1); }, {}}};
    CHECK(monitor(traj, fns).worst() <= 1e-12);
  }
}

TEST_CASE("midpoint failure carries the step index", "[flows]")
{
  const auto jsr = strict_sr(3);
  IntegrateOptions o;
  o.scheme            = Scheme::midpoint;
  o.midpoint_max_iter = 1;
  try {
    integrate(running_example(), jsr, o);
    FAIL("expected StepFailure");
  } catch (const StepFailure & e) {
    CHECK(e.step() == 0);
  }

  // A field that only becomes stiff later.
  IntegrateOptions p;
  p.scheme = Scheme::midpoint;
  p.dt     = 0.1;
  p.steps  = 50;
  auto field = [](const SkewMatrix & m) { return (m.max_abs() * m.max_abs()) * m; };
  try {
    integrate_field(0.5 * running_example(), field, p, [](const SkewMatrix & m) { return m; });
    FAIL("expected StepFailure");
  } catch (const StepFailure & e) {
    CHECK(e.step() > 0);
  }
}

TEST_CASE("group reconstruction stays orthogonal and horizontal", "[flows]")
{
  const auto jsr = strict_sr(5);
  IntegrateOptions o;
  o.dt          = 1e-3;
  o.steps       = 2000;
  o.reconstruct = true;
  const auto tr = integrate(random_skew(5, 55), jsr, o);
  REQUIRE(tr.has_group());
  REQUIRE(tr.group.size() == tr.size());
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    CHECK(orthogonality_defect(tr.group[i + 1]) <= 1e-10);
    CHECK(tr.group[i + 1].determinant() > 0.0);
    const SkewMatrix vel = SkewMatrix::skew_part(tr.group[i].transpose() * tr.group[i + 1]);
    CHECK(split(vel).t_part.max_abs() <= 1e-10);
    const SkewMatrix om = omega_sr(0.5 * (tr.momenta[i] + tr.momenta[i + 1]), jsr);
    CHECK(((1.0 / o.dt) * vel - om).max_abs() <= 1e-5);
  }
}

TEST_CASE("monitor", "[flows]")
{
  Trajectory empty;
  const std::vector<ScalarFunction> none;
  CHECK_THROWS_AS(monitor(empty, none), InvalidArgument);

  // Negative control: flipping the t-component of the field breaks h_{3,2}.
  const auto jsr  = strict_sr(4);
  const auto fam  = sub_riemannian_family(jsr);
  const auto h32  = fam.entries.front().fn;
  REQUIRE(h32.name == "h_3_2");
  const SkewMatrix m0 = random_skew(4, 3);
  IntegrateOptions o;
  o.dt    = 1e-3;
  o.steps = 10000;
  auto wrong = [&jsr](const SkewMatrix & m) {
    const auto [p, t] = split(vf_sr(m, jsr));
    return p - t;
  };
  const auto bad  = integrate_field(m0, wrong, o, [&jsr](const SkewMatrix & m) { return omega_sr(m, jsr); });
  const auto good = integrate(m0, jsr, o);
  const std::vector<ScalarFunction> fns{h32};
  CHECK(monitor(bad, fns).worst() > 1e-3);
  CHECK(monitor(good, fns).worst() <= 1e-9);
}

TEST_CASE("record_invariants", "[flows]")
{
  const auto jsr = strict_sr(4);
  IntegrateOptions o;
  o.steps  = 5;
  auto tr  = integrate(random_skew(4, 2), jsr, o);
  const auto fam = sub_riemannian_family(jsr);
  record_invariants(tr, fam.casimirs);
  CHECK(tr.invariant_names == std::vector<std::string>{"C2", "C4"});
  REQUIRE(tr.invariant_log.size() == 6);
  CHECK(tr.invariant_log[3][1] == casimir(tr.momenta[3], 2));
}

// ---------------------------------------------------------------- manakov

TEST_CASE("h_lambda", "[manakov]")
{
  const auto jsr     = MassSpec::sub_riemannian({1.0, 2.0});
  const SkewMatrix m = running_example();
  CHECK_THAT(h_lambda(random_skew(5, 3), strict_sr(5), 3, 0.0), WithinAbs(0.0, 1e-15));
  const SkewMatrix r = random_skew(4, 8);
  double sq          = 0.0;
  for (double x : r.upper()) { sq += x * x; }
  CHECK_THAT(h_lambda(r, strict_sr(4), 2, 0.0), WithinRel(-sq, 1e-14));

  const auto h = extract_coefficients(m, jsr, 3);
  CHECK_THAT(h[2], WithinRel(-6.0, 1e-14));
  double poly = 0.0;
  for (int rr = 0; rr <= 3; ++rr) { poly += h[static_cast<std::size_t>(rr)]; }
  CHECK_THAT(h_lambda(m, jsr, 3, 1.0), WithinRel(poly, 1e-14));
  CHECK_THROWS_AS(h_lambda(m, jsr, 0, 1.0), InvalidArgument);
}

TEST_CASE("coefficient extraction matches the recurrence", "[manakov]")
{
  std::mt19937_64 rng(44);
  for (int n = 3; n <= 8; ++n) {
    const auto jsr = random_strict_sr(n, rng);
    for (int trial = 0; trial < 10; ++trial) {
      const SkewMatrix m = random_skew(n, rng);
      for (int k = 1; k <= n; ++k) {
        const auto got  = extract_coefficients(m, jsr, k);
        const auto want = oracle::trace_coefficients_by_r(m.mat(), jsr.diag(), k);
        const double scale =
          std::pow(std::max(m.mat().norm(), jsr.diag().norm()), k);
        for (int r = 0; r <= k; ++r) {
          CHECK(std::abs(got[static_cast<std::size_t>(r)] - want[static_cast<std::size_t>(r)]) <= 1e-12 * scale);
          if (r % 2 == 1) { CHECK(std::abs(got[static_cast<std::size_t>(r)]) <= 1e-10 * scale); }
        }
        CHECK_THAT(got[0], WithinRel(jsr.diag().array().pow(k).sum() / k, 1e-12));
      }
    }
  }
}

TEST_CASE("coefficients reproduce h_lambda at fresh lambda", "[manakov]")
{
  const auto jsr = strict_sr(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SkewMatrix m = random_skew(6, seed);
    for (int k = 2; k <= 6; ++k) {
      const auto h = extract_coefficients(m, jsr, k);
      for (double lam : {0.37, -1.3, 2.71}) {
        double sum = 0.0;
        for (int r = 0; r <= k; ++r) { sum += std::pow(lam, k - r) * h[static_cast<std::size_t>(r)]; }
        const double direct = h_lambda(m, jsr, k, lam);
        CHECK(std::abs(sum - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
      }
    }
  }
}

TEST_CASE("degree cap", "[manakov]")
{
  const auto jsr = strict_sr(4);
  CHECK_NOTHROW(extract_coefficients(random_skew(4, 1), jsr, 12));
  CHECK_THROWS_AS(extract_coefficients(random_skew(4, 1), jsr, 13), UnsupportedDegree);
  CHECK_THROWS_AS(diff_h(random_skew(4, 1), jsr, 14, 2), UnsupportedDegree);
}

TEST_CASE("diff_h closed forms", "[manakov]")
{
  const auto jsr     = strict_sr(5);
  const SkewMatrix m = random_skew(5, 6);
  const Matrix j     = jsr.matrix();
  CHECK((diff_h(m, jsr, 3, 2).mat() - (m.mat() * j + j * m.mat())).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((diff_h(m, jsr, 2, 2).mat() - m.mat()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(diff_h(m, jsr, 4, 0).mat().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(diff_h(m, jsr, 3, 4), InvalidArgument);
  CHECK_THROWS_AS(diff_h(m, jsr, 0, 0), InvalidArgument);
}

TEST_CASE("diff_h matches the recurrence and finite differences", "[manakov]")
{
  std::mt19937_64 rng(99);
  for (int n = 3; n <= 7; ++n) {
    const auto jsr     = random_strict_sr(n, rng);
    const SkewMatrix m = random_skew(n, rng);
    for (int k = 2; k <= n; ++k) {
      const auto p = oracle::power_coefficients(m.mat(), jsr.diag(), k - 1);
      for (int r = 1; r <= k; ++r) {
        const Matrix want = p[static_cast<std::size_t>(k - r)];
        const double sc   = std::max(1.0, want.cwiseAbs().maxCoeff());
        CHECK((diff_h(m, jsr, k, r).mat() - want).cwiseAbs().maxCoeff() <= 1e-12 * sc);

        const auto f = [&](const SkewMatrix & x) { return extract_coefficients(x, jsr, k)[static_cast<std::size_t>(r)]; };
        const SkewMatrix fd = oracle::fd_gradient(f, m);
        CHECK((fd - gradient_h(m, jsr, k, r)).max_abs() <= 1e-7 * sc);
      }
    }
  }
}

TEST_CASE("Riemannian Manakov integrals", "[manakov]")
{
  const SkewMatrix r = random_skew(4, 12);
  CHECK_THAT(riemannian_f(r, MassSpec::riemannian({1, 1, 1, 1}), 3)[2], WithinRel((r.mat() * r.mat()).trace(), 1e-13));
  CHECK_THAT(riemannian_f(running_example(), MassSpec::riemannian({0, 1, 2}), 3)[2], WithinRel(-10.0, 1e-14));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int n = 3; n <= 6; ++n) {
    std::vector<double> jv(static_cast<std::size_t>(n));
    for (auto & x : jv) { x = u(rng); }
    const auto j   = MassSpec::riemannian(jv);
    const auto fam = riemannian_family(j);
    for (int t = 0; t < 20; ++t) {
      const SkewMatrix m = random_skew(n, rng);
      const SkewMatrix v = vf_riemannian(m, j);
      for (const auto & e : fam.entries) {
        const SkewMatrix g = e.fn.gradient(m);
        CHECK(std::abs(pairing(g, v)) <= 1e-11 * g.max_abs() * v.max_abs() * n * n);
      }
      for (int k = 2; k <= n; ++k) {
        const SkewMatrix g = gradient_from_trace(diff_f(m, j, k, k));
        CHECK(std::abs(pairing(g, v)) <= 1e-12 * std::max(1.0, g.max_abs() * v.max_abs()) * n * n);
      }
    }
  }
}

TEST_CASE("every sub-Riemannian integral is conserved pointwise", "[manakov]")
{
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n        = 3 + trial % 4;
    const auto jsr     = random_strict_sr(n, rng);
    const SkewMatrix m = random_skew(n, rng);
    const SkewMatrix v = vf_sr(m, jsr);
    for (int k = 3; k <= n; ++k) {
      for (int r = 2; r < k; r += 2) {
        const DiffMatrix d = diff_h(m, jsr, k, r);
        const double val   = (d.mat() * v.mat()).trace();
        CHECK(std::abs(val) <= 1e-11 * d.mat().cwiseAbs().maxCoeff() * v.max_abs() * n);
      }
    }
  }
}

TEST_CASE("Casimir gradients", "[manakov]")
{
  const SkewMatrix m = random_skew(6, 13);
  for (int k = 1; k <= 3; ++k) {
    const SkewMatrix fd = oracle::fd_gradient([k](const SkewMatrix & x) { return casimir(x, k); }, m);
    CHECK((fd - casimir_gradient(m, k)).max_abs() <= 1e-7 * std::max(1.0, fd.max_abs()));
  }
  CHECK_THROWS_AS(casimir(m, 0), InvalidArgument);
}

TEST_CASE("integral counts", "[manakov]")
{
  CHECK(expected_count(4) == 2);
  CHECK(expected_count(5) == 4);
  CHECK(expected_count(6) == 6);
  CHECK(expected_count(7) == 9);
  for (int n = 3; n <= 12; ++n) {
    CHECK(expected_count(n) == count_by_degree(n));
    CHECK(expected_count(n) == count_by_parity(n));
  }
  CHECK_THROWS_AS(expected_count(2), InvalidArgument);
}

TEST_CASE("integral family layout", "[manakov]")
{
  for (int n = 3; n <= 9; ++n) {
    const auto fam = sub_riemannian_family(strict_sr(n));
    CHECK(static_cast<int>(fam.entries.size()) == expected_count(n));
    CHECK(static_cast<int>(fam.casimirs.size()) == n / 2);
    for (const auto & e : fam.entries) {
      CHECK(e.k >= 3);
      CHECK(e.k <= n);
      CHECK(e.r % 2 == 0);
      CHECK(e.r > 0);
      CHECK(e.r < e.k);
    }
    CHECK(fam.casimirs.front().name == "C2");
    CHECK(fam.functions().size() == fam.entries.size() + fam.casimirs.size());
  }
  CHECK_THROWS_AS(sub_riemannian_family(MassSpec::riemannian({1, 2, 3})), InvalidArgument);
}
