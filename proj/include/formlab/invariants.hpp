#pragma once

#include <optional>
#include <string>
#include <vector>

#include "formlab/form.hpp"
#include "formlab/fpvariety.hpp"

namespace formlab {

struct InvariantOptions {
  int b_bound = 5;                    // sup-norm of the primitive pencil search box
  int random_b_extra = 8;             // additional random large pencil directions
  std::vector<unsigned long> primes = {5, 7, 11, 13, 17};
  FpOptions fp;                       // trials / exact threshold / seed
  int vstar_max_vars = 8;             // skip the V* estimate beyond this many variables
};

// Rank of the symmetric Gram matrix of a quadratic form (computed on the
// integer Hessian, which has the same rank).
int quadratic_rank(const Form& f);

// (lower, upper) for the least number of products of positive-degree forms
// summing to f. Quadratics: (ceil(rank/2), rank). Higher degree: (1, #terms).
std::pair<int, int> h_invariant_bounds(const Form& f);

// dim {x : grad f(x) = 0}. Quadratics are exact (n - rank); otherwise the
// finite-field point-count estimate.
FpDimensionEstimate singular_locus_dimension(const Form& f,
                                             const std::vector<unsigned long>& primes,
                                             const FpOptions& opt = {});

struct PencilProbe {
  std::vector<Int> b;
  int dim_sing = -1;
  bool exact = false;  // quadratic rank path or zero pencil member
  bool zero_member = false;
  int h_lower = 0, h_upper = 0;
  std::optional<int> rank;  // quadratics only
};

struct UInvariantResult {
  int u = -1;
  std::vector<Int> arg_b;
  std::vector<PencilProbe> probes;
  int b_bound = 0;
  bool consistent = true;  // every non-exact estimate was cross-prime consistent
};

// max over searched primitive b (|b| <= b_bound plus a few random large ones)
// of dim Sing(f_b). A finite search bounds the true maximum from below only.
UInvariantResult u_invariant(const FormSystem& sys, int b_bound,
                             const std::vector<unsigned long>& primes,
                             const FpOptions& opt = {}, int random_b_extra = 8);

enum class Verdict { kPass, kFail, kInconclusive };

std::string verdict_name(Verdict v);

struct ConditionCheck {
  Verdict verdict = Verdict::kInconclusive;
  Int lhs = 0;        // the measured quantity
  Int threshold = 0;  // must be strictly exceeded
  Int margin = 0;     // lhs - threshold
  std::string note;
};

struct InvariantReport {
  UInvariantResult u;
  std::optional<FpDimensionEstimate> dim_v_star;
  int h_lower = 0, h_upper = 0;          // system h over the searched pencil
  std::optional<int> min_pencil_rank;    // degree 2 only
  ConditionCheck theorem1;               // n - u > r(r+1)(d-1)2^(d-1)
  ConditionCheck theorem2;               // h (or the rank clause at d = 2)
  ConditionCheck corollary1;             // inf g via g(f_b) >= n - dim Sing(f_b)
  Int phi;                               // phi(d); exact for d <= 5, an upper bound beyond
  bool phi_is_bound = false;
  Int theorem2_threshold = 0;            // phi * r(r+1)(d-1)2^(d-1)
  Int theorem2a_threshold = 0;           // phi * (r(r+1)(d-1)2^(d-1) + (d-1)r(r-1))
  bool consistent = true;
};

// phi(2)=phi(3)=1, phi(4)=3, phi(5)=13; beyond that ceil((log 2)^-d * d!),
// flagged as a bound rather than a value.
Int phi_function(int d, bool* is_bound = nullptr);

InvariantReport check_theorem_conditions(const FormSystem& sys,
                                         const InvariantOptions& opt = {});

}  // namespace formlab
