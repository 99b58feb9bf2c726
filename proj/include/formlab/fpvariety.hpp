#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "formlab/form.hpp"

namespace formlab {

// Point set over F_p to measure: either the common zero locus of a list of
// forms, or the locus where the Jacobian of a system drops below full rank.
struct FpEquations {
  enum class Kind { kVanishing, kJacobianRankBelow };
  Kind kind = Kind::kVanishing;
  std::vector<Form> forms;
  int n_vars = 0;
  int rank_threshold = 0;

  static FpEquations vanishing(std::vector<Form> eqs);
  static FpEquations jacobian_rank_below(const FormSystem& sys);
};

struct FpPrimeCount {
  unsigned long p = 0;
  bool exact = false;
  double count = 0.0;  // exact count, or hits/trials * p^n when sampled
  unsigned long long hits = 0, trials = 0;
  double log_p_count = -1.0;  // -1 flags an empty count
  double wilson_log_lo = -1.0, wilson_log_hi = -1.0;
};

struct FpDimensionEstimate {
  std::vector<FpPrimeCount> per_prime;
  std::vector<unsigned long> skipped_primes;  // bad reduction (coefficient content)
  int dim_estimate = -1;  // rounded median of per-prime exponents
  bool consistent = false;
  std::string method;
};

struct FpOptions {
  unsigned long long trials = 2'000'000;
  unsigned long long exact_threshold = 10'000'000;  // enumerate exactly when p^n <= this
  std::uint64_t seed = 12345;
  int workers = 1;
};

// Point-count dimension heuristic: a variety of dimension e carries about
// C * p^e points over F_p, so log_p(count) estimates e. Exact enumeration up
// to the threshold, seeded uniform sampling beyond it, Wilson-interval bounds
// on sampled counts, and a cross-prime consistency flag instead of a guess.
FpDimensionEstimate variety_dimension_fp(const FpEquations& eqs,
                                         const std::vector<unsigned long>& primes,
                                         const FpOptions& opt = {});

}  // namespace formlab
