#pragma once

// Internal: shared scan over Weyl near-solution tuples. Drives both the
// near-solution counting function and the psi-matrix construction, so the
// two agree on the tuple set and on the canonical graded order.

#include <cstdint>
#include <functional>
#include <vector>

#include "formlab/enumerate.hpp"
#include "formlab/form.hpp"
#include "formlab/guarded.hpp"
#include "formlab/linalg.hpp"

namespace formlab::detail {

class NearScan {
 public:
  // tuple_bound: sup-norm bound B on each of the d-1 vectors.
  // threshold: the strict bound on the distance to the nearest integer.
  NearScan(const FormSystem& sys, std::vector<Rat> alpha, Int tuple_bound,
           PowThreshold threshold);

  // Visits qualifying tuples in canonical graded order; gamma[i][j] holds
  // Gamma_{i+1}(e_{j+1}, tuple). Returning false from visit stops the scan.
  // Returns the number of qualifying tuples seen (complete iff not stopped).
  unsigned long long scan(
      const std::function<bool(const std::vector<std::int64_t>&, const IMat&)>& visit) const;

  unsigned long long count() const;  // full scan, no callback

  std::int64_t bound() const { return bound_; }
  int tuple_dims() const { return dims_; }

 private:
  template <class T>
  unsigned long long scan_impl(
      const std::function<bool(const std::vector<std::int64_t>&, const IMat&)>* visit) const;

  const FormSystem& sys_;
  std::vector<Rat> alpha_;
  PowThreshold threshold_;
  std::int64_t bound_ = 0;
  int dims_ = 0;
  Int q_common_;               // common denominator of the phases
  std::vector<Int> weights_;   // alpha_i * q_common_
  std::vector<std::vector<Form>> grad_;  // grad_[i][j] = d f_i / d x_j
  bool int64_ok_ = false;
};

}  // namespace formlab::detail
