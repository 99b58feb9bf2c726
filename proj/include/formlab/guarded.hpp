#pragma once

#include "formlab/numeric.hpp"

namespace formlab {

// Threshold of the shape P^e with rational P > 0 and rational exponent e.
// Integral exponents give an exact rational threshold; otherwise comparisons
// go through interval arithmetic with directed rounding, raising
// PrecisionError instead of guessing when the interval cannot separate the
// operands at max_bits.
class PowThreshold {
 public:
  PowThreshold(const Rat& base, const Rat& exponent, int max_bits = 256);

  // Decides x < P^e.
  bool less_than(const Rat& x) const;

  bool is_exact() const { return exact_; }
  const Rat& exact_value() const;
  // Best-effort double value (midpoint of the final interval when inexact).
  double approx() const;

 private:
  Rat base_;
  Rat exponent_;
  int max_bits_;
  bool exact_ = false;
  Rat exact_value_;
};

// floor(P^e) computed exactly for integral e, otherwise via directed rounding;
// raises PrecisionError if the floor stays ambiguous at max_bits.
Int guarded_floor_pow(const Rat& base, const Rat& exponent, int max_bits = 256);

}  // namespace formlab
