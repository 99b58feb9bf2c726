#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace formlab {

// All counting and certificate logic runs on exact integers / rationals.
using Int = mpz_class;
using Rat = mpq_class;

// Raised when a guarded fixed-precision comparison cannot be decided at the
// configured precision. Callers must not guess; the CLI maps this to exit 3.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an enumeration would exceed a configured cap.
class EnumerationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accepts "p/q" or a plain integer, optionally signed. Decimal notation is
// rejected so no input is silently rounded.
Rat parse_rational(std::string_view text);

std::string to_string(const Int& v);
std::string to_string(const Rat& v);

Int pow_int(const Int& base, unsigned long e);
Rat pow_rat(const Rat& base, long e);

// floor/ceil of a rational, converted to int64; throws std::overflow_error
// if the result does not fit.
std::int64_t floor_to_i64(const Rat& x);
std::int64_t ceil_to_i64(const Rat& x);

// gcd of absolute values; 0 for an all-zero/empty vector.
Int content(const std::vector<Int>& v);

// Divides out the content and flips signs so the first nonzero entry is
// positive. The zero vector is returned unchanged.
std::vector<Int> primitive_vector(std::vector<Int> v);

// Nearest integer, ties rounded away from zero. Exact.
Int round_half_away(const Rat& x);

std::uint64_t isqrt_u64(std::uint64_t n);

// True iff n >= 0 is a perfect square; root receives the nonnegative root.
bool perfect_square_i128(__int128 n, std::int64_t* root);

}  // namespace formlab
