#include <random>

#include "doctest.h"
#include "formlab/linalg.hpp"
#include "test_util.hpp"

using namespace formlab;
using testutil::to_ints;

namespace {

IMat mat(std::vector<std::vector<long>> rows) {
  IMat m;
  for (auto& r : rows) m.push_back(to_ints(r));
  return m;
}

}  // namespace

TEST_CASE("rank certificate: worked examples") {
  auto prop = exact_rank_with_certificate(mat({{2, 4}, {1, 2}}));
  CHECK(prop.rank == 1);
  REQUIRE(prop.left_kernel.has_value());
  CHECK(*prop.left_kernel == to_ints({1, -2}));

  auto id = exact_rank_with_certificate(mat({{1, 0}, {0, 1}}));
  CHECK(id.rank == 2);
  CHECK(!id.left_kernel.has_value());

  auto zero = exact_rank_with_certificate(mat({{0, 0, 0}, {0, 0, 0}}));
  CHECK(zero.rank == 0);
  REQUIRE(zero.left_kernel.has_value());
  CHECK(*zero.left_kernel == to_ints({1, 0}));

  // r x 0 matrix: every row is trivially zero
  IMat empty_cols(3);
  auto e = exact_rank_with_certificate(empty_cols);
  CHECK(e.rank == 0);
  REQUIRE(e.left_kernel.has_value());
  CHECK(*e.left_kernel == to_ints({1, 0, 0}));
}

TEST_CASE("rank certificate: randomized soundness") {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 200; ++t) {
    int rows = 2 + static_cast<int>(gen() % 3);
    int cols = 1 + static_cast<int>(gen() % 5);
    IMat m(rows, std::vector<Int>(cols));
    for (auto& row : m) {
      for (auto& v : row) v = Int(static_cast<long>(gen() % 11) - 5);
    }
    auto cert = exact_rank_with_certificate(m);
    CHECK(cert.rank <= std::min(rows, cols));
    if (cert.left_kernel) {
      const auto& b = *cert.left_kernel;
      CHECK(content(b) == 1);
      int lead = 0;
      for (const Int& v : b) {
        if (v != 0) {
          lead = sgn(v);
          break;
        }
      }
      CHECK(lead > 0);
      for (int c = 0; c < cols; ++c) {
        Int dot = 0;
        for (int r = 0; r < rows; ++r) dot += b[r] * m[r][c];
        CHECK(dot == 0);
      }
    } else {
      CHECK(cert.rank == rows);
    }
  }
}

TEST_CASE("determinant and adjugate") {
  CHECK(determinant(mat({{6}})) == 6);
  CHECK(determinant(mat({{1, 2}, {3, 4}})) == -2);
  CHECK(determinant(mat({{0, 1}, {1, 0}})) == -1);
  CHECK(determinant(mat({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}})) == 0);

  std::mt19937_64 gen(37);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(gen() % 4);
    IMat m(n, std::vector<Int>(n));
    for (auto& row : m) {
      for (auto& v : row) v = Int(static_cast<long>(gen() % 13) - 6);
    }
    Int det = determinant(m);
    IMat adj = adjugate(m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Int lhs = 0;
        for (int k = 0; k < n; ++k) lhs += adj[i][k] * m[k][j];
        CHECK(lhs == (i == j ? det : Int(0)));
      }
    }
  }
}

TEST_CASE("primitive_vector normalization") {
  CHECK(primitive_vector(to_ints({-2, 4})) == to_ints({1, -2}));
  CHECK(primitive_vector(to_ints({0, -3, 6})) == to_ints({0, 1, -2}));
  CHECK(primitive_vector(to_ints({0, 0})) == to_ints({0, 0}));
}
