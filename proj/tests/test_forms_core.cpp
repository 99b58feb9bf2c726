#include <random>

#include "doctest.h"
#include "formlab/form.hpp"
#include "test_util.hpp"

using namespace formlab;
using testutil::polarize_oracle;
using testutil::random_form;
using testutil::random_vector;
using testutil::to_ints;

TEST_CASE("parse: worked examples") {
  Form f = Form::parse("x1^2 - x2^2", 2);
  CHECK(f.degree() == 2);
  CHECK(f.term_count() == 2);
  CHECK(f.terms().at({2, 0}) == 1);
  CHECK(f.terms().at({0, 2}) == -1);

  // the r=1, k=2 bilinear instance after renaming y11 -> x3, y21 -> x4
  Form q = Form::parse("x1*x3 + x2*x4", 4);
  CHECK(q == testutil::q_family(1, 2).form(1));

  CHECK_THROWS_AS(Form::parse("x1^2 + x2", 2), std::invalid_argument);
  CHECK_THROWS_AS(Form::parse("x1 + x3", 2), std::invalid_argument);
  CHECK_THROWS_AS(Form::parse("2 x1", 2), std::invalid_argument);
  CHECK_THROWS_AS(Form::parse("", 2), std::invalid_argument);
  CHECK_THROWS_AS(Form::parse("x1 - x1", 2), std::invalid_argument);  // collapses to zero
}

TEST_CASE("parse: coefficients, powers, repeated factors") {
  Form f = Form::parse("3*x1^2*x2 - x2^3 + 2*x1*x1*x2", 2);
  CHECK(f.degree() == 3);
  CHECK(f.terms().at({2, 1}) == 5);  // 3 + 2 merge
  CHECK(f.terms().at({0, 3}) == -1);
}

TEST_CASE("printer round-trips through parse") {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(gen() % 5);
    int d = 1 + static_cast<int>(gen() % 4);
    Form f = random_form(gen, n, d);
    CHECK(Form::parse(f.str(), n) == f);
  }
}

TEST_CASE("evaluate: worked examples") {
  Form f = Form::parse("x1^2 - x2^2", 2);
  CHECK(f.evaluate(to_ints({3, 3})) == 0);
  CHECK(f.evaluate(to_ints({5, 4})) == 9);
  Form g = Form::parse("x1*x2*x3", 3);
  CHECK(g.evaluate(to_ints({2, 3, -1})) == -6);
  CHECK_THROWS_AS(g.evaluate(to_ints({1, 2})), std::invalid_argument);
}

TEST_CASE("pencil_form: combinations and the degenerate member") {
  FormSystem sys({Form::parse("x1^2", 2), Form::parse("x2^2", 2)});
  CHECK(pencil_form(sys, to_ints({1, -1})) == Form::parse("x1^2 - x2^2", 2));

  FormSystem twin({Form::parse("x1*x2", 2), Form::parse("x1*x2", 2)});
  Form zero = pencil_form(twin, to_ints({1, -1}));
  CHECK(zero.is_zero());
  CHECK(zero.degree() == 2);

  FormSystem q22 = testutil::q_family(2, 2);
  CHECK(pencil_form(q22, to_ints({0, 1})) == q22.form(2));
  CHECK_THROWS_AS(pencil_form(q22, to_ints({0, 0})), std::invalid_argument);
}

TEST_CASE("gradient: worked examples and Euler relation") {
  Form f = Form::parse("x1^2 - x2^2", 2);
  auto g = f.gradient_at(to_ints({1, 2}));
  CHECK(g == to_ints({2, -4}));
  Form h = Form::parse("x1*x2*x3", 3);
  CHECK(h.gradient_at(to_ints({1, 1, 1})) == to_ints({1, 1, 1}));
  CHECK(h.gradient_at(to_ints({0, 0, 0})) == to_ints({0, 0, 0}));

  std::mt19937_64 gen(11);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + static_cast<int>(gen() % 4);
    int d = 1 + static_cast<int>(gen() % 4);
    Form r = random_form(gen, n, d);
    auto x = random_vector(gen, n, 6);
    auto grad = r.gradient_at(x);
    Int euler = 0;
    for (int j = 0; j < n; ++j) euler += x[j] * grad[j];
    CHECK(euler == Int(d) * r.evaluate(x));
  }
}

TEST_CASE("polarize: worked examples") {
  Form f = Form::parse("x1*x2", 2);
  CHECK(polarize(f, {to_ints({1, 0}), to_ints({0, 1})}) == 1);

  Form sq = Form::parse("x1^2", 1);
  CHECK(polarize(sq, {to_ints({3}), to_ints({3})}) == 2 * 9);

  Form c = Form::parse("x1^2*x2", 2);
  CHECK(polarize(c, {to_ints({1, 0}), to_ints({1, 0}), to_ints({0, 1})}) == 2);
  CHECK_THROWS_AS(polarize(c, {to_ints({1, 0}), to_ints({0, 1})}), std::invalid_argument);
}

TEST_CASE("polarize agrees with the symbolic expansion oracle") {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(gen() % 4);
    int d = 1 + static_cast<int>(gen() % 4);
    Form f = random_form(gen, n, d);
    std::vector<std::vector<Int>> xs;
    for (int i = 0; i < d; ++i) xs.push_back(random_vector(gen, n, 4));
    CHECK(polarize(f, xs) == polarize_oracle(f, xs));
  }
}

TEST_CASE("polarize: diagonal identity, symmetry, multilinearity, pencil linearity") {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 60; ++t) {
    int n = 1 + static_cast<int>(gen() % 5);
    int d = 1 + static_cast<int>(gen() % 4);
    Form f = random_form(gen, n, d);

    // Gamma(x,...,x) = d! f(x)
    auto x = random_vector(gen, n, 5);
    Int fact = 1;
    for (int i = 2; i <= d; ++i) fact *= i;
    CHECK(polarize(f, std::vector<std::vector<Int>>(d, x)) == fact * f.evaluate(x));

    // full permutation symmetry
    std::vector<std::vector<Int>> xs;
    for (int i = 0; i < d; ++i) xs.push_back(random_vector(gen, n, 4));
    Int base = polarize(f, xs);
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    do {
      std::vector<std::vector<Int>> ys;
      for (int i = 0; i < d; ++i) ys.push_back(xs[perm[i]]);
      CHECK(polarize(f, ys) == base);
    } while (std::next_permutation(perm.begin(), perm.end()));

    // additivity and integer homogeneity in the first slot
    auto u = random_vector(gen, n, 4);
    auto v = random_vector(gen, n, 4);
    long a = static_cast<long>(gen() % 7) - 3;
    long b = static_cast<long>(gen() % 7) - 3;
    std::vector<std::vector<Int>> combo = xs;
    for (int j = 0; j < n; ++j) combo[0][j] = Int(a) * u[j] + Int(b) * v[j];
    std::vector<std::vector<Int>> with_u = xs, with_v = xs;
    with_u[0] = u;
    with_v[0] = v;
    CHECK(polarize(f, combo) == Int(a) * polarize(f, with_u) + Int(b) * polarize(f, with_v));
  }

  // pencil linearity: Gamma_{f_b} = sum_i b_i Gamma_i
  for (int t = 0; t < 20; ++t) {
    int n = 2 + static_cast<int>(gen() % 3);
    int d = 2 + static_cast<int>(gen() % 2);
    FormSystem sys({random_form(gen, n, d), random_form(gen, n, d)});
    std::vector<Int> b = {Int(static_cast<long>(gen() % 9) - 4),
                          Int(static_cast<long>(gen() % 9) - 4)};
    if (b[0] == 0 && b[1] == 0) b[0] = 1;
    Form fb = pencil_form(sys, b);
    std::vector<std::vector<Int>> xs;
    for (int i = 0; i < d; ++i) xs.push_back(random_vector(gen, n, 4));
    Int lhs = fb.is_zero() ? Int(0) : polarize(fb, xs);
    CHECK(lhs == b[0] * polarize(sys.form(1), xs) + b[1] * polarize(sys.form(2), xs));
  }
}

TEST_CASE("multilinear_basis_row: unit-vector slot") {
  FormSystem one({Form::parse("x1^2", 1)});
  CHECK(multilinear_basis_row(one, 1, 1, {to_ints({5})}) == 10);

  FormSystem prod({Form::parse("x1*x2", 2)});
  CHECK(multilinear_basis_row(prod, 1, 1, {to_ints({3, 7})}) == 7);
  CHECK(multilinear_basis_row(prod, 1, 2, {to_ints({3, 7})}) == 3);
  CHECK_THROWS_AS(multilinear_basis_row(prod, 2, 1, {to_ints({3, 7})}), std::invalid_argument);

  // equals the partial-derivative polarization for random instances
  std::mt19937_64 gen(23);
  for (int t = 0; t < 40; ++t) {
    int n = 1 + static_cast<int>(gen() % 4);
    int d = 2 + static_cast<int>(gen() % 3);
    FormSystem sys({random_form(gen, n, d)});
    int j = 1 + static_cast<int>(gen() % n);
    std::vector<std::vector<Int>> xs;
    for (int i = 0; i + 1 < d; ++i) xs.push_back(random_vector(gen, n, 4));
    Form pj = sys.form(1).partial(j);
    Int via_partial = pj.is_zero() ? Int(0) : polarize(pj, xs);
    CHECK(multilinear_basis_row(sys, 1, j, xs) == via_partial);
  }
}

TEST_CASE("multilinear_equation matches polarize on stacked tuples") {
  std::mt19937_64 gen(29);
  for (int t = 0; t < 40; ++t) {
    int n = 1 + static_cast<int>(gen() % 3);
    int d = 2 + static_cast<int>(gen() % 3);
    Form f = random_form(gen, n, d);
    int j = 1 + static_cast<int>(gen() % n);
    Form eq = multilinear_equation(f, j);
    CHECK(eq.n_vars() == n * (d - 1));
    std::vector<std::vector<Int>> xs;
    std::vector<Int> stacked;
    for (int i = 0; i + 1 < d; ++i) {
      xs.push_back(random_vector(gen, n, 4));
      for (const Int& v : xs.back()) stacked.push_back(v);
    }
    FormSystem sys({f});
    Int expect = multilinear_basis_row(sys, 1, j, xs);
    Int got = eq.is_zero() ? Int(0) : eq.evaluate(stacked);
    CHECK(got == expect);
  }
}

TEST_CASE("hessian of a quadratic") {
  Form f = Form::parse("x1^2 - x2^2", 2);
  auto h = hessian_matrix(f);
  CHECK(h[0][0] == 2);
  CHECK(h[1][1] == -2);
  CHECK(h[0][1] == 0);
  Form g = Form::parse("x1*x2", 2);
  auto hg = hessian_matrix(g);
  CHECK(hg[0][1] == 1);
  CHECK(hg[1][0] == 1);
}

TEST_CASE("box: validation and parsing") {
  CHECK_THROWS_AS(Box({{Rat(-2), Rat(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(Box({{Rat(1), Rat(0)}}), std::invalid_argument);
  Box b = Box::parse("-1:1,0:1/2", 2);
  CHECK(b.intervals()[1].second == Rat(1, 2));
  Box rep = Box::parse("-1:1", 3);
  CHECK(rep.n_vars() == 3);
  CHECK(Box::parse(b.str(), 2).str() == b.str());
}

TEST_CASE("system files: header, comments, errors") {
  FormSystem sys = parse_system("# demo\nn=2 d=2 r=2\nx1^2\n\nx2^2 # trailing\n");
  CHECK(sys.r() == 2);
  CHECK(sys.degree() == 2);
  CHECK_THROWS_AS(parse_system("n=2 d=3 r=1\nx1^2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_system("x1^2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_system("n=2 d=2 r=2\nx1^2\n"), std::invalid_argument);
}
