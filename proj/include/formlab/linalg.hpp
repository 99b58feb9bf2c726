#pragma once

#include <optional>
#include <vector>

#include "formlab/numeric.hpp"

namespace formlab {

using IMat = std::vector<std::vector<Int>>;  // row-major, rectangular

struct RankCertificate {
  int rank = 0;
  // Present iff the rows are linearly dependent over Q: a primitive integer
  // vector b != 0 with b^T M = 0, first nonzero entry positive. Deterministic:
  // the dependency of the lowest-index row that reduces to zero.
  std::optional<std::vector<Int>> left_kernel;
};

// Rank over Q by fraction-free elimination; exact.
RankCertificate exact_rank_with_certificate(const IMat& m);

int rank(const IMat& m);

// Bareiss fraction-free determinant of a square matrix.
Int determinant(IMat m);

// Adjugate of a square matrix: adj(M) * M = M * adj(M) = det(M) * Id.
IMat adjugate(const IMat& m);

IMat transpose(const IMat& m);

}  // namespace formlab
