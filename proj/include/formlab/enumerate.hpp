#pragma once

#include <cstdint>
#include <vector>

#include "formlab/form.hpp"
#include "formlab/numeric.hpp"

namespace formlab {

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;  // empty by default
  std::int64_t size() const { return hi < lo ? 0 : hi - lo + 1; }
};

// Integer slices of the dilated box P*B, one closed range per coordinate,
// computed by exact rational ceil/floor.
std::vector<IntRange> dilated_box_ranges(const Box& box, const Rat& P);

// Number of lattice points in the ranges (exact).
Int box_point_total(const std::vector<IntRange>& ranges);

// Upper bound on |f(x)| and on every Horner partial sum met during the
// specialized evaluation, for x in the ranges. Decides int64 vs bignum path.
Int value_bound(const Form& f, const std::vector<IntRange>& ranges);

// Exact count of lattice points where every equation vanishes. Nested
// coordinate loops; a subtree is cut as soon as some equation is pinned to a
// nonzero constant, and the innermost coordinate is resolved by solving the
// specialized univariate polynomial instead of scanning where possible.
Int count_common_zeros(const std::vector<Form>& eqs, const std::vector<IntRange>& ranges,
                       int workers = 1);

// counts[m] = #{x in ranges : sum_i weights[i]*forms[i](x) = m (mod modulus)}.
// Visits every lattice point; throws EnumerationCapError beyond point_cap.
std::vector<unsigned long long> residue_spectrum(const std::vector<Form>& forms,
                                                 const std::vector<Int>& weights,
                                                 unsigned long modulus,
                                                 const std::vector<IntRange>& ranges,
                                                 int workers, const Int& point_cap);

// Kahan-compensated sum of e(sum_i theta_i * f_i(x)) over the box, with
// e(t) = exp(2*pi*i*t). The outermost range is cut into a fixed number of
// partitions reduced in index order, so the result does not depend on the
// worker count. Throws EnumerationCapError beyond point_cap.
std::pair<double, double> phase_sum_float(const std::vector<Form>& forms,
                                          const std::vector<double>& theta,
                                          const std::vector<IntRange>& ranges, int workers,
                                          const Int& point_cap);

// Visits integer tuples of the given dimension with sup-norm <= bound, in
// shells of growing norm; within a shell coordinates vary lexicographically
// (earlier coordinate more significant) with per-coordinate value order
// 0, 1, -1, 2, -2, ... Only tuples of sup-norm exactly s appear in shell s,
// so the overall order is graded. Visitor returns false to stop the scan;
// the function returns false iff stopped.
template <class Visit>
bool for_each_graded_tuple(int dims, std::int64_t bound, Visit&& visit) {
  if (bound < 0 || dims <= 0) return true;
  std::vector<std::int64_t> x(static_cast<std::size_t>(dims), 0);
  if (!visit(const_cast<const std::vector<std::int64_t>&>(x))) return false;
  struct Rec {
    std::vector<std::int64_t>& x;
    Visit& visit;
    int dims;
    std::int64_t s;
    bool go(int pos, bool touched) {
      bool last = pos == dims - 1;
      if (last && !touched) {
        x[pos] = s;
        if (!visit(x)) return false;
        x[pos] = -s;
        bool ok = visit(x);
        x[pos] = 0;
        return ok;
      }
      for (std::int64_t t = 0; t <= s; ++t) {
        for (int half = 0; half < (t == 0 ? 1 : 2); ++half) {
          x[pos] = half == 0 ? t : -t;
          if (last) {
            if (!visit(x)) return false;
          } else if (!go(pos + 1, touched || t == s)) {
            return false;
          }
        }
      }
      x[pos] = 0;
      return true;
    }
  };
  for (std::int64_t s = 1; s <= bound; ++s) {
    Rec rec{x, visit, dims, s};
    if (!rec.go(0, false)) return false;
  }
  return true;
}

}  // namespace formlab
