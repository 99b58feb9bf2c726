#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "formlab/count.hpp"
#include "formlab/form.hpp"

namespace formlab {

struct CircleOptions {
  Int block_point_cap = Int(20'000'000);  // residue enumeration per variable block
  double inner_cell_cap = 2e8;            // quadrature cells per inner integral
  int workers = 1;
};

// S_{a,q} = sum over x in (Z/q)^n of e((a_1 f_1(x) + ... + a_r f_r(x)) / q),
// with exact integer phase classes. Variables that never share a monomial are
// enumerated in independent blocks and the block sums multiplied.
std::complex<double> complete_exponential_sum_mod_q(const FormSystem& sys,
                                                    const std::vector<Int>& a, unsigned long q,
                                                    const CircleOptions& opt = {});

struct SingularSeriesTruncation {
  unsigned long q_max = 0;
  std::vector<double> terms;  // A(q) = q^-n * sum over coprime residue tuples
  std::vector<std::pair<unsigned long, double>> partial_sums;
  double value = 0.0;
  double tail_estimate = 0.0;  // partial-sum variation over the last decade
  double max_imag = 0.0;       // largest imaginary part met in a q-term
};

SingularSeriesTruncation singular_series(const FormSystem& sys, unsigned long q_max,
                                         const CircleOptions& opt = {});

struct SingularIntegralTruncation {
  double t_max = 0.0;
  int grid = 0;  // requested per-dimension floor; refined per cell-phase target
  double value = 0.0;
  double max_imag = 0.0;
  std::vector<std::pair<double, double>> convergence_trace;  // (T', value up to T')
  bool converged = false;  // relative change <= 20% on the last doubling
};

// J = integral over gamma in [-T,T]^r of integral over B of e(gamma . f(x)),
// nested composite-midpoint quadrature with the per-cell phase increment kept
// below pi/4 by refining the grid.
SingularIntegralTruncation singular_integral(const FormSystem& sys, const Box& box,
                                             double t_max, int grid,
                                             const CircleOptions& opt = {});

struct PredictRow {
  Rat P;
  Int N;
  double prediction = 0.0;
  double ratio = 0.0;
};

struct PredictReport {
  SingularSeriesTruncation series;
  SingularIntegralTruncation integral;
  std::vector<PredictRow> rows;
  bool positive_growth = false;  // n > r*d
  bool consistent = false;       // ratio near 1 at the top P and improving
  bool real_obstruction = false;
  std::optional<bool> hypothesis_pass;  // filled by the caller when checked
  std::string hypothesis_note;
};

// Compares brute-force counts against the truncated prediction value * P^(n-rd).
PredictReport predict_and_verify(const FormSystem& sys, const Box& box,
                                 const std::vector<Rat>& P_list, unsigned long q_max,
                                 double t_max, int grid,
                                 std::optional<bool> hypothesis_pass = std::nullopt,
                                 const CircleOptions& opt = {});

// Internal helpers exposed for white-box tests.
std::vector<std::vector<int>> variable_blocks(const std::vector<Form>& forms, int n_vars);
std::complex<double> oscillatory_box_integral(const FormSystem& sys, const Box& box,
                                              const std::vector<double>& gamma, int grid,
                                              const CircleOptions& opt = {});

}  // namespace formlab
