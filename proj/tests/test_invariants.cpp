#include <random>

#include "doctest.h"
#include "formlab/count.hpp"
#include "formlab/invariants.hpp"
#include "test_util.hpp"

using namespace formlab;
using testutil::q_family;
using testutil::random_form;
using testutil::to_ints;

namespace {

// Exact F_p point count by brute force, independent of the library path.
unsigned long long naive_fp_count(const std::vector<Form>& eqs, unsigned long p, int n) {
  std::vector<std::uint64_t> x(n, 0);
  unsigned long long count = 0;
  for (;;) {
    std::vector<Int> xi;
    for (auto v : x) xi.emplace_back(static_cast<unsigned long>(v));
    bool all = true;
    for (const Form& f : eqs) {
      Int v = f.evaluate(xi) % static_cast<long>(p);
      if (v != 0) {
        all = false;
        break;
      }
    }
    if (all) ++count;
    int j = 0;
    while (j < n && ++x[j] == p) x[j++] = 0;
    if (j == n) break;
  }
  return count;
}

}  // namespace

TEST_CASE("quadratic_rank: worked examples") {
  CHECK(quadratic_rank(Form::parse("x1^2 - x2^2", 2)) == 2);
  CHECK(quadratic_rank(Form::parse("x1*x2", 2)) == 2);
  CHECK(quadratic_rank(Form::parse("x1^2", 5)) == 1);
  CHECK_THROWS_AS(quadratic_rank(Form::parse("x1^3", 1)), std::invalid_argument);
}

TEST_CASE("h_invariant_bounds: worked examples") {
  CHECK(h_invariant_bounds(Form::parse("x1^2 - x2^2", 2)) == std::pair<int, int>{1, 2});
  CHECK(h_invariant_bounds(Form::parse("x1^2 + x2^2 + x3^2", 3)) == std::pair<int, int>{2, 3});
  CHECK(h_invariant_bounds(Form::parse("x1^3 + x2^3", 2)) == std::pair<int, int>{1, 2});
}

TEST_CASE("singular_locus_dimension: exact quadratic path") {
  auto hyp = singular_locus_dimension(Form::parse("x1^2 - x2^2", 2), {5, 7});
  CHECK(hyp.dim_estimate == 0);
  CHECK(hyp.method == "quadratic-rank");
  CHECK(hyp.consistent);
  CHECK(singular_locus_dimension(Form::parse("x1^2", 2), {5, 7}).dim_estimate == 1);
}

TEST_CASE("variety_dimension_fp: gradient fixtures") {
  // Sing of a nonsingular cone is the origin: dimension 0
  Form f = Form::parse("x1^2 + x2^2 + x3^2", 3);
  std::vector<Form> grads;
  for (int j = 1; j <= 3; ++j) grads.push_back(f.partial(j));
  auto est = variety_dimension_fp(FpEquations::vanishing(grads), {5, 7, 11});
  CHECK(est.dim_estimate == 0);
  CHECK(est.consistent);
  for (const auto& pc : est.per_prime) CHECK(pc.count == 1.0);

  // Sing(x1^2) inside affine 3-space is the hyperplane x1 = 0: dimension 2
  Form g = Form::parse("x1^2", 3);
  std::vector<Form> g_grads;
  for (int j = 1; j <= 3; ++j) {
    Form pg = g.partial(j);
    if (!pg.is_zero()) g_grads.push_back(pg);
  }
  auto est2 = variety_dimension_fp(FpEquations::vanishing(g_grads), {5, 7, 11});
  CHECK(est2.dim_estimate == 2);
  for (const auto& pc : est2.per_prime) {
    CHECK(pc.count == doctest::Approx(static_cast<double>(pc.p) * pc.p));
  }
}

TEST_CASE("variety_dimension_fp: exact path agrees with brute force") {
  std::mt19937_64 gen(71);
  for (int t = 0; t < 6; ++t) {
    Form f = random_form(gen, 3, 2, 4, 3);
    auto est = variety_dimension_fp(FpEquations::vanishing({f}), {5, 7});
    for (const auto& pc : est.per_prime) {
      CHECK(pc.count == doctest::Approx(
                            static_cast<double>(naive_fp_count({f}, pc.p, 3))));
    }
  }
}

TEST_CASE("variety_dimension_fp: bad primes are skipped") {
  Form f = Form::parse("5*x1^2 + 5*x2^2", 2);
  auto est = variety_dimension_fp(FpEquations::vanishing({f}), {5, 7});
  REQUIRE(est.skipped_primes.size() == 1);
  CHECK(est.skipped_primes[0] == 5);
  CHECK(est.per_prime.size() == 1);
}

TEST_CASE("V* of the bilinear family: dim V* = k(r-1) + r - 1") {
  // (r, k) = (2, 2): the rank-drop locus has dimension 3 = u + r - 1
  FormSystem q22 = q_family(2, 2);
  auto est = variety_dimension_fp(FpEquations::jacobian_rank_below(q22), {5, 7, 11});
  CHECK(est.dim_estimate == 3);
  CHECK(est.consistent);
  // exact counts p^3 + p^2 - p: proportional-row analysis of the 2 x 6 Jacobian
  for (const auto& pc : est.per_prime) {
    double p = static_cast<double>(pc.p);
    CHECK(pc.count == doctest::Approx(p * p * p + p * p - p));
  }

  // r = 1: V* degenerates to Sing(Q_1) = {0} for the nonsingular bilinear form
  FormSystem q12 = q_family(1, 2);
  auto est1 = variety_dimension_fp(FpEquations::jacobian_rank_below(q12), {5, 7, 11});
  CHECK(est1.dim_estimate == 0);
}

TEST_CASE("u_invariant: diagonal pair and the bilinear family") {
  FormSystem diag({Form::parse("x1^2", 2), Form::parse("x2^2", 2)});
  auto u = u_invariant(diag, 2, {5, 7, 11});
  CHECK(u.u == 1);  // f_b = x1^2 alone has a line of singular points

  FormSystem q22 = q_family(2, 2);
  auto u22 = u_invariant(q22, 2, {5, 7, 11});
  CHECK(u22.u == 2);  // k(r-1) for every nonzero b: exact rank path
  CHECK(u22.consistent);
  for (const auto& probe : u22.probes) CHECK(probe.dim_sing == 2);

  // r = 1 reduces to dim Sing(f_1)
  FormSystem single({Form::parse("x1^2 - x2^2", 2)});
  CHECK(u_invariant(single, 3, {5, 7}).u == 0);
}

TEST_CASE("u_invariant: scaling a form or permuting forms leaves u unchanged") {
  std::mt19937_64 gen(73);
  FormSystem sys({random_form(gen, 3, 2, 4, 3), random_form(gen, 3, 2, 4, 3)});
  auto base = u_invariant(sys, 3, {5, 7});
  std::vector<std::pair<Exponents, Int>> negated;
  for (const auto& [e, c] : sys.form(1).terms()) negated.emplace_back(e, -c);
  FormSystem flipped({Form::from_terms(3, negated), sys.form(2)});
  CHECK(u_invariant(flipped, 3, {5, 7}).u == base.u);
  FormSystem swapped({sys.form(2), sys.form(1)});
  CHECK(u_invariant(swapped, 3, {5, 7}).u == base.u);
}

TEST_CASE("u_invariant: dependent pencils surface the degenerate member") {
  FormSystem dep({Form::parse("x1*x2", 2), Form::parse("x1*x2", 2)});
  auto u = u_invariant(dep, 2, {5, 7});
  CHECK(u.u == 2);  // b = (1, -1) kills the pencil: Sing is all of affine 2-space
  bool saw_zero_member = false;
  for (const auto& probe : u.probes) saw_zero_member |= probe.zero_member;
  CHECK(saw_zero_member);
}

TEST_CASE("phi function: table and growth bound") {
  bool is_bound = true;
  CHECK(phi_function(2, &is_bound) == 1);
  CHECK(!is_bound);
  CHECK(phi_function(3) == 1);
  CHECK(phi_function(4) == 3);
  CHECK(phi_function(5) == 13);
  bool bound6 = false;
  Int phi6 = phi_function(6, &bound6);
  CHECK(bound6);
  // ceil((log 2)^-6 * 720) = ceil(6492.03)
  CHECK(phi6 == 6493);
}

TEST_CASE("check_theorem_conditions: bilinear family pass/fail fixtures") {
  // (r, k) = (2, 7): n = 21, u = 7, n - u = 14 > 12: both checks pass by 2
  InvariantOptions opt;
  opt.b_bound = 3;
  opt.primes = {5, 7, 11};
  auto rep27 = check_theorem_conditions(q_family(2, 7), opt);
  CHECK(rep27.u.u == 7);
  CHECK(rep27.theorem1.verdict == Verdict::kPass);
  CHECK(rep27.theorem1.margin == 2);
  CHECK(rep27.theorem2.verdict == Verdict::kPass);
  CHECK(rep27.theorem2.margin == 2);  // min rank 14 > 2r(r+1) = 12
  CHECK(!rep27.dim_v_star.has_value());  // 21 variables: estimate skipped
  CHECK(rep27.corollary1.verdict == Verdict::kPass);

  // (r, k) = (2, 5): n - u = 10 <= 12 fails
  auto rep25 = check_theorem_conditions(q_family(2, 5), opt);
  CHECK(rep25.u.u == 5);
  CHECK(rep25.theorem1.verdict == Verdict::kFail);
  CHECK(rep25.theorem1.margin == -2);

  // (r, k) = (2, 2): dim V* estimated and consistent with u
  auto rep22 = check_theorem_conditions(q_family(2, 2), opt);
  REQUIRE(rep22.dim_v_star.has_value());
  CHECK(rep22.dim_v_star->dim_estimate == 3);
  CHECK(rep22.u.u == 2);
  CHECK(rep22.theorem1.verdict == Verdict::kFail);
  CHECK(rep22.consistent);
}

TEST_CASE("check_theorem_conditions: thresholds for d = 4") {
  // r = 1: Theorem 2 threshold phi * r(r+1)(d-1)2^(d-1) = 3 * 48 = 144 and the
  // earlier system threshold adds (d-1)r(r-1) = 0, so both agree at 144
  std::vector<std::pair<Exponents, Int>> terms;
  for (int j = 0; j < 2; ++j) {
    Exponents e(2, 0);
    e[j] = 4;
    terms.emplace_back(e, Int(1));
  }
  FormSystem quartic({Form::from_terms(2, terms)});
  InvariantOptions opt;
  opt.b_bound = 1;
  opt.primes = {5, 7};
  auto rep = check_theorem_conditions(quartic, opt);
  CHECK(rep.phi == 3);
  CHECK(rep.theorem2_threshold == 144);
  CHECK(rep.theorem2a_threshold == 144);
  CHECK(rep.theorem2.verdict == Verdict::kFail);  // h <= #monomials = 2

  // r = 2 and d = 4: thresholds 9(8r^2+8r) = 432 vs 9(9r^2+7r) = 450
  FormSystem pair({Form::parse("x1^4", 2), Form::parse("x2^4", 2)});
  auto rep2 = check_theorem_conditions(pair, opt);
  CHECK(rep2.theorem2_threshold == 432);
  CHECK(rep2.theorem2a_threshold == 450);
}

TEST_CASE("probe chain: dim Sing <= dim V* on random quadratic systems") {
  std::mt19937_64 gen(79);
  InvariantOptions opt;
  opt.b_bound = 2;
  opt.primes = {5, 7, 11};
  for (int t = 0; t < 5; ++t) {
    FormSystem sys({random_form(gen, 3, 2, 4, 3), random_form(gen, 3, 2, 4, 3)});
    auto rep = check_theorem_conditions(sys, opt);
    if (rep.dim_v_star && rep.dim_v_star->consistent) {
      for (const auto& probe : rep.u.probes) {
        CHECK(probe.dim_sing <= rep.dim_v_star->dim_estimate);
      }
    }
  }
}

TEST_CASE("growth link: g estimate respects rank and the singular-locus bound") {
  // quadratics: g ~ rank(A); any form: g >= n - dim Sing within tolerance
  std::vector<Form> corpus = {
      Form::parse("x1^2 + x2^2 + x3^2 + x4^2 - x5^2", 5),
      Form::parse("x1*x3 + x2*x4", 4),
      Form::parse("x1^2 - x2^2", 2),
      Form::parse("x1^2 + x1*x2", 2),
  };
  for (const Form& f : corpus) {
    auto g = estimate_g_invariant(f, {10, 20, 40});
    int rk = quadratic_rank(f);
    CHECK(g.g_estimate >= rk - 0.25);
    auto sing = singular_locus_dimension(f, {5, 7, 11});
    CHECK(g.g_estimate >= f.n_vars() - sing.dim_estimate - 0.5);
  }
  // a cubic exercises the sampled singular-locus route
  Form cubic = Form::parse("x1^3", 1);
  auto g = estimate_g_invariant(cubic, {10, 20, 40});
  auto sing = singular_locus_dimension(cubic, {5, 7, 11});
  CHECK(g.g_estimate >= cubic.n_vars() - sing.dim_estimate - 0.5);
}
