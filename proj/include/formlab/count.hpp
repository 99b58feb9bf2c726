#pragma once

#include <string>
#include <vector>

#include "formlab/enumerate.hpp"
#include "formlab/form.hpp"

namespace formlab {

struct CountResult {
  Int count;
  Rat P;
  Int points_enumerated;  // cardinality of the enumeration domain (P*B) cap Z^n
  double elapsed_seconds = 0.0;
};

// N(P): integer points of the dilated box P*B on which every form vanishes.
// Exact; membership in the closed box decided by rational comparison.
CountResult count_solutions(const FormSystem& sys, const Box& box, const Rat& P,
                            int workers = 1);

// M_f(P): (d-1)-tuples of integer vectors with all coordinates bounded by P
// in absolute value on which Gamma_f(e_j, x^(2),...,x^(d)) vanishes for all j.
Int count_multilinear_zero(const Form& f, std::int64_t P, int workers = 1);

// Number of tuples x^(2),...,x^(d) with sup-norms at most P^xi such that the
// distance of sum_i alpha_i Gamma_i(e_j, x^(2),...,x^(d)) to the nearest
// integer is strictly below P^-eta for every j.
unsigned long long count_weyl_near_solutions(const FormSystem& sys,
                                             const std::vector<Rat>& alpha, const Rat& xi,
                                             const Rat& eta, const Rat& P,
                                             int precision_bits = 256);

struct GEstimate {
  std::vector<std::pair<std::int64_t, Int>> samples;  // (P, M_f(P))
  double slope = 0.0;        // least-squares slope of log M against log P
  double g_estimate = 0.0;   // (d-1) * n - slope
  double residual = 0.0;     // RMS residual of the log-log fit
};

// Finite-sample proxy for the g-invariant from the decay of M_f(P).
GEstimate estimate_g_invariant(const Form& f, const std::vector<std::int64_t>& P_list,
                               int workers = 1);

// Two-column CSV (with header) for external plotting.
void write_series_csv(const std::string& path, const std::string& col_a,
                      const std::string& col_b,
                      const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace formlab
