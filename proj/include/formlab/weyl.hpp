#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "formlab/form.hpp"
#include "formlab/linalg.hpp"

namespace formlab {

struct WeylOptions {
  std::size_t column_cap = 10'000'000;  // psi columns processed before giving up
  int precision_bits = 256;
  int workers = 1;
  Int phase_point_cap = Int(400'000'000);     // lattice points for S(alpha)
  unsigned long residue_modulus_cap = 1 << 20;  // largest modulus for the exact path
};

struct ExpSumResult {
  std::complex<double> value;
  Int points;             // lattice points in the enumeration domain
  bool exact_phase_path;  // residue-class accumulation (true) or floating phases
};

// S(alpha) = sum over x in P*B of e(sum_i alpha_i f_i(x)). With rational
// phases and a modest common denominator the sum is accumulated as exact
// per-residue counts and turned into a complex number only at the end.
ExpSumResult exponential_sum(const FormSystem& sys, const std::vector<Rat>& alpha,
                             const Box& box, const Rat& P, const WeylOptions& opt = {});

struct PsiColumnLabel {
  int j;  // 1-based variable index
  std::vector<std::int64_t> tuple;
};

// psi has r rows; column (j, tuple) holds Gamma_i(e_j, tuple) in row i. The
// tuples are the Weyl near-solutions at xi = theta, eta = d - (d-1)*theta.
struct PsiMatrix {
  int r = 0;
  std::vector<PsiColumnLabel> labels;
  std::vector<std::vector<Int>> columns;  // columns[c][i], r entries each
  unsigned long long near_tuples = 0;
};

PsiMatrix build_psi(const FormSystem& sys, const std::vector<Rat>& alpha, const Rat& theta,
                    const Rat& P, const WeylOptions& opt = {});

struct MajorArc {
  Int q;                    // positive, gcd(q, a_1..a_r) = 1
  std::vector<Int> a;
  std::vector<Rat> errors;  // |q*alpha_i - a_i|, exact
  // measured size constants: log_P(q) and max_i log_P |q*alpha_i - a_i|
  double log_p_q = 0.0;
  std::optional<double> max_log_p_error;  // absent when every error is 0
  IMat minor;                             // the selected r x r full-rank minor
  std::vector<PsiColumnLabel> minor_labels;
};

struct RankDeficient {
  std::vector<Int> b;  // primitive, b^T psi = 0
  Form witness_pencil;
  unsigned long long near_tuples = 0;
  unsigned long long columns_seen = 0;
};

struct MinorArcEvidence {
  double abs_s = 0.0;
  double trivial_bound = 0.0;            // number of lattice points
  std::optional<double> exponent_bound;  // n - 2^{1-d} * g_tilde * theta when g_tilde known
};

using DichotomyOutcome = std::variant<MajorArc, RankDeficient, MinorArcEvidence>;

// Case analysis on rank(psi): a full-rank minor yields the rational
// approximation (q, a) through the adjugate; a rank defect yields an exact
// integer certificate b with b^T psi = 0.
DichotomyOutcome major_arc_approximation(const FormSystem& sys, const std::vector<Rat>& alpha,
                                         const Rat& theta, const Rat& P,
                                         const WeylOptions& opt = {});

struct DichotomyReport {
  double abs_s = 0.0;
  double trivial_bound = 0.0;       // lattice point count
  double bound_alternative_i = 0.0;  // P^(n-k)
  bool alternative_i_holds = false;
  unsigned long long near_count = 0;
  double bound_alternative_ii = 0.0;  // P^((d-1)*n*theta - 2^(d-1)*k)
  bool alternative_ii_holds = false;
  std::optional<double> g_tilde;       // caller-provided lower bound on inf_b g(f_b)
  std::optional<double> minor_arc_exponent;  // n - 2^(1-d)*g_tilde*theta
  DichotomyOutcome outcome;
  bool exact_phase_path = false;
};

// Evaluates both alternatives empirically at this finite P and runs the
// constructive case analysis. g_tilde, when supplied, feeds the minor-arc
// exponent n - 2^{1-d} g~ theta.
DichotomyReport run_dichotomy(const FormSystem& sys, const std::vector<Rat>& alpha,
                              const Rat& theta, const Box& box, const Rat& P, double k,
                              std::optional<double> g_tilde = std::nullopt,
                              const WeylOptions& opt = {});

}  // namespace formlab
