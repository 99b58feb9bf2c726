#include <cmath>
#include <random>

#include "doctest.h"
#include "formlab/count.hpp"
#include "formlab/weyl.hpp"
#include "test_util.hpp"

using namespace formlab;
using testutil::random_form;
using testutil::random_nonsingular_quadratic;
using testutil::to_ints;

namespace {

// Independent float-path oracle for S(alpha).
std::complex<double> naive_expsum(const FormSystem& sys, const std::vector<Rat>& alpha,
                                  const Box& box, const Rat& P) {
  auto ranges = dilated_box_ranges(box, P);
  int n = sys.n_vars();
  std::vector<std::int64_t> x(n);
  for (int j = 0; j < n; ++j) x[j] = ranges[j].lo;
  std::complex<double> s{0, 0};
  for (;;) {
    std::vector<Int> xi;
    for (auto v : x) xi.emplace_back(static_cast<long>(v));
    double phase = 0;
    for (int i = 1; i <= sys.r(); ++i) {
      phase += alpha[i - 1].get_d() * sys.form(i).evaluate(xi).get_d();
    }
    s += std::polar(1.0, 2 * M_PI * phase);
    int j = 0;
    while (j < n && ++x[j] > ranges[j].hi) x[j++] = ranges[j].lo;
    if (j == n) break;
  }
  return s;
}

}  // namespace

TEST_CASE("exponential_sum: zero phase counts lattice points") {
  FormSystem sys({Form::parse("x1^2 + x2^2", 2)});
  auto s = exponential_sum(sys, {Rat(0)}, Box::unit(2), Rat(7));
  CHECK(s.value.real() == doctest::Approx(225.0));
  CHECK(s.value.imag() == 0.0);
  CHECK(s.points == 225);
  CHECK(s.exact_phase_path);
}

TEST_CASE("exponential_sum: parity telescoping at alpha = 1/2") {
  FormSystem sys({Form::parse("x1^2", 1)});
  for (long p : {4, 10, 20}) {
    auto s = exponential_sum(sys, {Rat(1, 2)}, Box::unit(1), Rat(p));
    CHECK(s.value.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s.value.imag()) < 1e-12);
  }
}

TEST_CASE("exponential_sum: exact residue path agrees with the float oracle") {
  std::mt19937_64 gen(53);
  for (int t = 0; t < 10; ++t) {
    int n = 1 + static_cast<int>(gen() % 2);
    int r = 1 + static_cast<int>(gen() % 2);
    std::vector<Form> forms;
    for (int i = 0; i < r; ++i) forms.push_back(random_form(gen, n, 2, 3, 4));
    FormSystem sys(std::move(forms));
    std::vector<Rat> alpha;
    for (int i = 0; i < r; ++i) {
      alpha.emplace_back(1 + static_cast<long>(gen() % 5), 1 + static_cast<long>(gen() % 9));
      alpha.back().canonicalize();
    }
    auto s = exponential_sum(sys, alpha, Box::unit(n), Rat(6));
    CHECK(s.exact_phase_path);
    auto oracle = naive_expsum(sys, alpha, Box::unit(n), Rat(6));
    CHECK(std::abs(s.value - oracle) < 1e-10 * (1 + std::abs(oracle)));
  }
}

TEST_CASE("exponential_sum: |S(alpha)| <= S(0) and S(-alpha) = conj(S(alpha))") {
  std::mt19937_64 gen(59);
  FormSystem sys({random_form(gen, 2, 3, 4, 4), random_form(gen, 2, 3, 4, 4)});
  auto s0 = exponential_sum(sys, {Rat(0), Rat(0)}, Box::unit(2), Rat(8));
  for (int t = 0; t < 8; ++t) {
    std::vector<Rat> alpha = {Rat(static_cast<long>(gen() % 9) - 4, 1 + static_cast<long>(gen() % 7)),
                              Rat(static_cast<long>(gen() % 9) - 4, 1 + static_cast<long>(gen() % 7))};
    for (auto& a : alpha) a.canonicalize();
    auto sp = exponential_sum(sys, alpha, Box::unit(2), Rat(8));
    CHECK(std::abs(sp.value) <= s0.value.real() + 1e-9);
    std::vector<Rat> neg = {Rat(-alpha[0]), Rat(-alpha[1])};
    auto sn = exponential_sum(sys, neg, Box::unit(2), Rat(8));
    CHECK(std::abs(sn.value - std::conj(sp.value)) < 1e-9 * (1 + std::abs(sp.value)));
  }
}

TEST_CASE("exponential_sum: float path matches exact path near the modulus cap") {
  FormSystem sys({Form::parse("x1^2 - x2*x1", 2)});
  std::vector<Rat> alpha = {Rat(3, 97)};
  WeylOptions exact_opt;
  auto exact = exponential_sum(sys, alpha, Box::unit(2), Rat(9), exact_opt);
  WeylOptions float_opt;
  float_opt.residue_modulus_cap = 2;  // force the floating path
  auto fl = exponential_sum(sys, alpha, Box::unit(2), Rat(9), float_opt);
  CHECK(exact.exact_phase_path);
  CHECK(!fl.exact_phase_path);
  CHECK(std::abs(exact.value - fl.value) < 1e-9 * (1 + std::abs(exact.value)));
}

TEST_CASE("build_psi: 1x7 fixture from the quarter-phase square") {
  FormSystem sys({Form::parse("x1^2", 1)});
  PsiMatrix psi = build_psi(sys, {Rat(1, 3)}, Rat(1), Rat(10));
  CHECK(psi.r == 1);
  CHECK(psi.near_tuples == 7);
  REQUIRE(psi.columns.size() == 7);
  // canonical graded order: 0, 3, -3, 6, -6, 9, -9 giving entries 2x
  std::vector<long> expect = {0, 6, -6, 12, -12, 18, -18};
  for (std::size_t c = 0; c < expect.size(); ++c) {
    CHECK(psi.columns[c][0] == expect[c]);
    CHECK(psi.labels[c].j == 1);
  }
  // entries equal the public multilinear basis row on the labels
  for (std::size_t c = 0; c < psi.columns.size(); ++c) {
    std::vector<std::vector<Int>> xs{to_ints({psi.labels[c].tuple[0]})};
    CHECK(psi.columns[c][0] == multilinear_basis_row(sys, 1, psi.labels[c].j, xs));
  }
}

TEST_CASE("build_psi: zero matrix when only the zero tuple qualifies") {
  FormSystem sys({Form::parse("x1^2", 1)});
  // theta = 1/2: B = floor(sqrt(10)) = 3 and the threshold is the irrational
  // 10^(-3/2) ~ 0.0316, decided through the guarded comparison. Distances
  // ||2x/7|| for 0 < |x| <= 3 stay at >= 1/7, so only x = 0 survives.
  PsiMatrix psi = build_psi(sys, {Rat(1, 7)}, Rat(1, 2), Rat(10));
  CHECK(psi.near_tuples == 1);
  REQUIRE(psi.columns.size() == 1);
  CHECK(psi.columns[0][0] == 0);
}

TEST_CASE("build_psi: identical forms give identical rows") {
  FormSystem sys({Form::parse("x1*x2", 2), Form::parse("x1*x2", 2)});
  PsiMatrix psi = build_psi(sys, {Rat(1, 3), Rat(1, 3)}, Rat(1), Rat(6));
  CHECK(psi.near_tuples > 1);
  for (const auto& col : psi.columns) CHECK(col[0] == col[1]);
}

TEST_CASE("build_psi: column cap trips") {
  FormSystem sys({Form::parse("x1^2", 1)});
  WeylOptions opt;
  opt.column_cap = 3;
  CHECK_THROWS_AS(build_psi(sys, {Rat(1, 3)}, Rat(1), Rat(10), opt), EnumerationCapError);
}

TEST_CASE("major_arc_approximation: hand trace (q, a) = (3, 1)") {
  FormSystem sys({Form::parse("x1^2", 1)});
  auto outcome = major_arc_approximation(sys, {Rat(1, 3)}, Rat(1), Rat(10));
  REQUIRE(std::holds_alternative<MajorArc>(outcome));
  const auto& major = std::get<MajorArc>(outcome);
  CHECK(major.q == 3);
  CHECK(major.a == to_ints({1}));
  CHECK(major.errors[0] == 0);
  CHECK(!major.max_log_p_error.has_value());
  // the selected minor is the first independent column: x = 3 gives (6)
  CHECK(major.minor[0][0] == 6);
}

TEST_CASE("major_arc_approximation: identical forms yield the (1,-1) certificate") {
  FormSystem sys({Form::parse("x1*x2", 2), Form::parse("x1*x2", 2)});
  auto outcome = major_arc_approximation(sys, {Rat(1, 3), Rat(1, 5)}, Rat(1), Rat(15));
  REQUIRE(std::holds_alternative<RankDeficient>(outcome));
  const auto& rd = std::get<RankDeficient>(outcome);
  CHECK(rd.b == to_ints({1, -1}));
  CHECK(rd.witness_pencil.is_zero());
}

TEST_CASE("major_arc_approximation: rational phases are recovered exactly") {
  std::mt19937_64 gen(61);
  for (int t = 0; t < 12; ++t) {
    int n = 3 + static_cast<int>(gen() % 2);
    Form f = random_nonsingular_quadratic(gen, n, 3);
    FormSystem sys({f});
    long q = 1 + static_cast<long>(gen() % 10);
    long a = 1 + static_cast<long>(gen() % (2 * q));
    Rat alpha(a, q);
    alpha.canonicalize();
    auto outcome = major_arc_approximation(sys, {alpha}, Rat(1), Rat(30));
    REQUIRE(std::holds_alternative<MajorArc>(outcome));
    const auto& major = std::get<MajorArc>(outcome);
    // q' * alpha integral with zero error, gcd(q', a') = 1
    Rat qa = Rat(major.q) * alpha;
    CHECK(qa.get_den() == 1);
    CHECK(major.errors[0] == 0);
    Int g = major.q;
    Int aa = abs(major.a[0]);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), aa.get_mpz_t());
    CHECK(g == 1);
    // the reduced q divides the unreduced determinant of the selected minor
    Int det = abs(determinant(major.minor));
    CHECK(det % major.q == 0);
  }
}

TEST_CASE("major_arc_approximation: adjugate route for r = 2 with exact errors") {
  // two diagonal quadratics, rational phases with distinct denominators
  FormSystem sys({Form::parse("x1^2 + x2^2 + x3^2", 3), Form::parse("x1^2 - x3^2", 3)});
  std::vector<Rat> alpha = {Rat(1, 3), Rat(2, 5)};
  auto outcome = major_arc_approximation(sys, alpha, Rat(1), Rat(30));
  REQUIRE(std::holds_alternative<MajorArc>(outcome));
  const auto& major = std::get<MajorArc>(outcome);
  CHECK(major.q >= 1);
  Int g = major.q;
  for (const Int& v : major.a) {
    Int av = abs(v);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), av.get_mpz_t());
  }
  CHECK(g == 1);
  for (int i = 0; i < 2; ++i) {
    Rat err = abs(Rat(major.q) * alpha[i] - Rat(major.a[i]));
    CHECK(err == major.errors[i]);
    CHECK(err == 0);  // rational phases with q | 15 are reachable at P = 30
  }
  // the selected minor satisfies the adjugate identity used in the proof
  IMat coeff = adjugate(transpose(major.minor));
  Int det = determinant(major.minor);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      Int dot = 0;
      for (int l = 0; l < 2; ++l) dot += coeff[i][l] * major.minor[k][l];
      CHECK(dot == (i == k ? det : Int(0)));
    }
  }
}

TEST_CASE("rank-deficiency certificate: b^T psi = 0 on dependent pencils") {
  std::mt19937_64 gen(67);
  for (int t = 0; t < 10; ++t) {
    int n = 2 + static_cast<int>(gen() % 2);
    Form f = random_form(gen, n, 2, 3, 3);
    long lam = (gen() % 2 ? 2 : -3);
    std::vector<std::pair<Exponents, Int>> scaled;
    for (const auto& [e, c] : f.terms()) scaled.emplace_back(e, Int(lam) * c);
    FormSystem sys({f, Form::from_terms(n, scaled)});
    std::vector<Rat> alpha = {Rat(1, 2), Rat(1, 3)};
    auto outcome = major_arc_approximation(sys, alpha, Rat(1), Rat(12));
    REQUIRE(std::holds_alternative<RankDeficient>(outcome));
    const auto& rd = std::get<RankDeficient>(outcome);
    CHECK(content(rd.b) == 1);
    // independent verification over the full psi matrix
    PsiMatrix psi = build_psi(sys, alpha, Rat(1), Rat(12));
    CHECK(psi.near_tuples == rd.near_tuples);
    for (const auto& col : psi.columns) {
      Int dot = 0;
      for (int i = 0; i < 2; ++i) dot += rd.b[i] * col[i];
      CHECK(dot == 0);
    }
    // every column tuple lies on the multilinear zero set of the witness
    if (!rd.witness_pencil.is_zero()) {
      Int mcount = count_multilinear_zero(rd.witness_pencil, 12);
      CHECK(mcount * Int(static_cast<long>(n)) >= Int(static_cast<unsigned long>(rd.columns_seen)));
    }
  }
}

TEST_CASE("run_dichotomy: zero phase lands in the major arc with q = 1") {
  FormSystem sys({Form::parse("x1^2 + x2^2", 2)});
  auto rep = run_dichotomy(sys, {Rat(0)}, Rat(1), Box::unit(2), Rat(8), 1.0);
  CHECK(rep.alternative_ii_holds);
  REQUIRE(std::holds_alternative<MajorArc>(rep.outcome));
  const auto& major = std::get<MajorArc>(rep.outcome);
  CHECK(major.q == 1);
  CHECK(major.a == to_ints({0}));
}

TEST_CASE("run_dichotomy: generic phase gives minor-arc evidence") {
  FormSystem sys({Form::parse("x1^2 + x2^2 + x3^2", 3)});
  // truncated pi - 3 at theta = 1/2: B = 2, threshold 8^(-3/2) ~ 0.044, and
  // ||2*alpha*x|| >= 0.28 for 0 < |x| <= 2, so only the zero tuple qualifies
  Rat alpha(14159, 100000);
  auto rep = run_dichotomy(sys, {alpha}, Rat(1, 2), Box::unit(3), Rat(8), 1.0, 6.0);
  CHECK(rep.near_count == 1);
  REQUIRE(std::holds_alternative<MinorArcEvidence>(rep.outcome));
  const auto& ev = std::get<MinorArcEvidence>(rep.outcome);
  CHECK(ev.abs_s < rep.trivial_bound);
  REQUIRE(ev.exponent_bound.has_value());
  CHECK(*ev.exponent_bound == doctest::Approx(3.0 - 0.5 * 6.0 * 0.5));
}

TEST_CASE("run_dichotomy: quarter phase reproduces the module fixture") {
  FormSystem sys({Form::parse("x1^2", 1)});
  auto rep = run_dichotomy(sys, {Rat(1, 3)}, Rat(1), Box::unit(1), Rat(10), 0.5);
  REQUIRE(std::holds_alternative<MajorArc>(rep.outcome));
  const auto& major = std::get<MajorArc>(rep.outcome);
  CHECK(major.q == 3);
  CHECK(major.a == to_ints({1}));
}
