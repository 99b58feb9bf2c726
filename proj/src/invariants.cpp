#include "formlab/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "formlab/enumerate.hpp"
#include "formlab/linalg.hpp"

namespace formlab {

int quadratic_rank(const Form& f) {
  if (f.degree() != 2) throw std::invalid_argument("quadratic_rank needs degree 2");
  if (f.is_zero()) throw std::invalid_argument("zero form rejected");
  return rank(hessian_matrix(f));
}

std::pair<int, int> h_invariant_bounds(const Form& f) {
  if (f.is_zero()) throw std::invalid_argument("zero form rejected");
  if (f.degree() == 2) {
    int rk = quadratic_rank(f);
    return {(rk + 1) / 2, rk};
  }
  return {1, static_cast<int>(f.term_count())};
}

FpDimensionEstimate singular_locus_dimension(const Form& f,
                                             const std::vector<unsigned long>& primes,
                                             const FpOptions& opt) {
  if (f.is_zero()) throw std::invalid_argument("zero form rejected");
  if (f.degree() == 2) {
    FpDimensionEstimate est;
    est.method = "quadratic-rank";
    est.dim_estimate = f.n_vars() - quadratic_rank(f);
    est.consistent = true;
    return est;
  }
  std::vector<Form> grads;
  for (int j = 1; j <= f.n_vars(); ++j) grads.push_back(f.partial(j));
  return variety_dimension_fp(FpEquations::vanishing(std::move(grads)), primes, opt);
}

namespace {

PencilProbe probe_pencil(const FormSystem& sys, std::vector<Int> b,
                         const std::vector<unsigned long>& primes, const FpOptions& opt,
                         bool* consistent) {
  PencilProbe probe;
  probe.b = std::move(b);
  Form fb = pencil_form(sys, probe.b);
  if (fb.is_zero()) {
    // Dependent forms: the pencil member vanishes identically, its singular
    // locus is all of affine space and its h-invariant is 0.
    probe.zero_member = true;
    probe.exact = true;
    probe.dim_sing = sys.n_vars();
    probe.h_lower = probe.h_upper = 0;
    if (sys.degree() == 2) probe.rank = 0;
    return probe;
  }
  if (sys.degree() == 2) {
    int rk = quadratic_rank(fb);
    probe.rank = rk;
    probe.exact = true;
    probe.dim_sing = sys.n_vars() - rk;
  } else {
    try {
      auto est = singular_locus_dimension(fb, primes, opt);
      probe.dim_sing = est.dim_estimate;
      if (!est.consistent) *consistent = false;
    } catch (const std::domain_error&) {
      // every prime had bad reduction for this member; leave it unresolved
      probe.dim_sing = -1;
      *consistent = false;
    }
  }
  auto [lo, hi] = probe.zero_member ? std::pair<int, int>{0, 0} : h_invariant_bounds(fb);
  probe.h_lower = lo;
  probe.h_upper = hi;
  return probe;
}

}  // namespace

UInvariantResult u_invariant(const FormSystem& sys, int b_bound,
                             const std::vector<unsigned long>& primes, const FpOptions& opt,
                             int random_b_extra) {
  if (b_bound < 1) throw std::invalid_argument("b_bound must be >= 1");
  int r = sys.r();
  UInvariantResult res;
  res.b_bound = b_bound;

  std::set<std::vector<long>> seen;
  std::vector<std::vector<Int>> directions;
  for_each_graded_tuple(r, b_bound, [&](const std::vector<std::int64_t>& t) {
    std::vector<Int> b(r);
    bool zero = true;
    for (int i = 0; i < r; ++i) {
      b[i] = Int(static_cast<long>(t[i]));
      if (t[i] != 0) zero = false;
    }
    if (zero) return true;
    b = primitive_vector(std::move(b));  // dedupe scalings and the sign flip
    std::vector<long> key;
    for (const Int& v : b) key.push_back(v.get_si());
    if (seen.insert(key).second) directions.push_back(std::move(b));
    return true;
  });
  // A few random large directions: extremes of dim Sing occur at special b,
  // and the box search alone can miss them.
  std::mt19937_64 gen(opt.seed ^ 0xB5297A4D3F84D5A3ULL);
  for (int t = 0; t < random_b_extra; ++t) {
    std::vector<Int> b(r);
    bool zero = true;
    for (int i = 0; i < r; ++i) {
      long v = static_cast<long>(gen() % 101) - 50;
      b[i] = v;
      if (v != 0) zero = false;
    }
    if (zero) continue;
    b = primitive_vector(std::move(b));
    std::vector<long> key;
    for (const Int& v : b) key.push_back(v.get_si());
    if (seen.insert(key).second) directions.push_back(std::move(b));
  }

  if (directions.empty()) throw std::invalid_argument("empty pencil search");
  for (auto& b : directions) {
    PencilProbe probe = probe_pencil(sys, b, primes, opt, &res.consistent);
    if (probe.dim_sing > res.u) {
      res.u = probe.dim_sing;
      res.arg_b = probe.b;
    }
    res.probes.push_back(std::move(probe));
  }
  return res;
}

Int phi_function(int d, bool* is_bound) {
  if (d < 2) throw std::invalid_argument("phi is defined for d >= 2");
  if (is_bound) *is_bound = d > 5;
  switch (d) {
    case 2:
    case 3:
      return 1;
    case 4:
      return 3;
    case 5:
      return 13;
    default: {
      // ceil((log 2)^-d * d!)
      double v = 1.0;
      for (int i = 2; i <= d; ++i) v *= i;
      v /= std::pow(std::log(2.0), d);
      return Int(static_cast<long>(std::ceil(v)));
    }
  }
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    default:
      return "inconclusive";
  }
}

InvariantReport check_theorem_conditions(const FormSystem& sys, const InvariantOptions& opt) {
  int n = sys.n_vars();
  int r = sys.r();
  int d = sys.degree();
  if (d < 2) throw std::invalid_argument("theorem checks need degree >= 2");

  InvariantReport rep;
  rep.u = u_invariant(sys, opt.b_bound, opt.primes, opt.fp, opt.random_b_extra);
  rep.consistent = rep.u.consistent;

  if (n <= opt.vstar_max_vars) {
    rep.dim_v_star =
        variety_dimension_fp(FpEquations::jacobian_rank_below(sys), opt.primes, opt.fp);
    if (!rep.dim_v_star->consistent) rep.consistent = false;
    // Sing(f_b) sits inside the rank-drop locus for every b.
    if (rep.dim_v_star->consistent && rep.u.u > rep.dim_v_star->dim_estimate) {
      rep.consistent = false;
    }
  }

  rep.h_lower = rep.h_upper = -1;
  int min_rank = -1;
  for (const auto& probe : rep.u.probes) {
    if (rep.h_lower == -1 || probe.h_lower < rep.h_lower) rep.h_lower = probe.h_lower;
    if (rep.h_upper == -1 || probe.h_upper < rep.h_upper) rep.h_upper = probe.h_upper;
    if (probe.rank && (min_rank == -1 || *probe.rank < min_rank)) min_rank = *probe.rank;
  }
  if (d == 2) rep.min_pencil_rank = min_rank;

  Int birch_threshold = Int(r) * (r + 1) * (d - 1) * pow_int(2, d - 1);
  bool phi_bound = false;
  rep.phi = phi_function(d, &phi_bound);
  rep.phi_is_bound = phi_bound;
  rep.theorem2_threshold = rep.phi * birch_threshold;
  rep.theorem2a_threshold =
      rep.phi * (birch_threshold + Int(d - 1) * r * (r - 1));

  auto strict = [](const Int& lhs, const Int& threshold) {
    return lhs > threshold ? Verdict::kPass : Verdict::kFail;
  };

  rep.theorem1.lhs = n - rep.u.u;
  rep.theorem1.threshold = birch_threshold;
  rep.theorem1.margin = rep.theorem1.lhs - rep.theorem1.threshold;
  rep.theorem1.verdict = rep.consistent ? strict(rep.theorem1.lhs, rep.theorem1.threshold)
                                        : Verdict::kInconclusive;
  rep.theorem1.note = "n - max_b dim Sing(f_b), searched |b| <= " + std::to_string(opt.b_bound);

  if (d == 2) {
    rep.theorem2.lhs = min_rank;
    rep.theorem2.threshold = Int(2) * r * (r + 1);
    rep.theorem2.margin = rep.theorem2.lhs - rep.theorem2.threshold;
    rep.theorem2.verdict = strict(rep.theorem2.lhs, rep.theorem2.threshold);
    rep.theorem2.note = "degree-2 clause: min pencil rank > 2r(r+1)";
  } else {
    rep.theorem2.threshold = rep.theorem2_threshold;
    if (Int(rep.h_lower) > rep.theorem2_threshold) {
      rep.theorem2.lhs = rep.h_lower;
      rep.theorem2.verdict = Verdict::kPass;
      rep.theorem2.note = "certified through the h lower bound";
    } else if (Int(rep.h_upper) <= rep.theorem2_threshold) {
      rep.theorem2.lhs = rep.h_upper;
      rep.theorem2.verdict = Verdict::kFail;
      rep.theorem2.note = "h upper bound already below the threshold";
    } else {
      rep.theorem2.lhs = rep.h_lower;
      rep.theorem2.verdict = Verdict::kInconclusive;
      rep.theorem2.note = "h known only within bounds for degree >= 3";
    }
    rep.theorem2.margin = rep.theorem2.lhs - rep.theorem2.threshold;
  }

  // inf_b g(f_b) >= n - max_b dim Sing(f_b); for quadratics also >= min rank,
  // which coincides with n - u on the searched pencil.
  rep.corollary1.lhs = n - rep.u.u;
  rep.corollary1.threshold = birch_threshold;
  rep.corollary1.margin = rep.corollary1.lhs - rep.corollary1.threshold;
  rep.corollary1.verdict = rep.consistent ? strict(rep.corollary1.lhs, rep.corollary1.threshold)
                                          : Verdict::kInconclusive;
  rep.corollary1.note = "lower bound on inf_b g(f_b) via the singular-locus inequality";
  return rep;
}

}  // namespace formlab
