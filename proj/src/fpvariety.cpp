#include "formlab/fpvariety.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace formlab {

namespace {

struct FpTerm {
  std::uint64_t c;
  std::vector<int> vars;  // variable indices, repeated by exponent
};

struct FpForm {
  std::vector<FpTerm> terms;

  static FpForm compile(const Form& f, unsigned long p) {
    FpForm out;
    for (const auto& [exp, coeff] : f.terms()) {
      Int c = coeff % static_cast<long>(p);
      if (c < 0) c += static_cast<long>(p);
      if (c == 0) continue;
      FpTerm t;
      t.c = c.get_ui();
      for (int j = 0; j < f.n_vars(); ++j) {
        for (int e = 0; e < exp[j]; ++e) t.vars.push_back(j);
      }
      out.terms.push_back(std::move(t));
    }
    return out;
  }

  std::uint64_t eval(const std::vector<std::uint64_t>& x, unsigned long p) const {
    std::uint64_t acc = 0;
    for (const auto& t : terms) {
      std::uint64_t m = t.c;
      for (int v : t.vars) m = m * x[v] % p;
      acc = (acc + m) % p;
    }
    return acc;
  }
};

int rank_mod_p(std::vector<std::vector<std::uint64_t>> m, unsigned long p) {
  int rows = static_cast<int>(m.size());
  int cols = rows ? static_cast<int>(m.front().size()) : 0;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < rows; ++i) {
      if (m[i][col] % p != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot == -1) continue;
    std::swap(m[rank], m[pivot]);
    for (int i = rank + 1; i < rows; ++i) {
      if (m[i][col] % p == 0) continue;
      std::uint64_t f1 = m[rank][col] % p, f2 = m[i][col] % p;
      for (int j = col; j < cols; ++j) {
        m[i][j] = (m[i][j] % p * f1 + (p - m[rank][j] % p) * f2) % p;
      }
    }
    ++rank;
  }
  return rank;
}

class FpPredicate {
 public:
  FpPredicate(const FpEquations& eqs, unsigned long p) : kind_(eqs.kind), p_(p) {
    if (kind_ == FpEquations::Kind::kVanishing) {
      for (const Form& f : eqs.forms) compiled_.push_back(FpForm::compile(f, p));
    } else {
      rank_threshold_ = eqs.rank_threshold;
      rows_ = static_cast<int>(eqs.forms.size());
      cols_ = eqs.n_vars;
      for (const Form& f : eqs.forms) {
        for (int j = 1; j <= eqs.n_vars; ++j) {
          jac_.push_back(FpForm::compile(f.partial(j), p));
        }
      }
      scratch_.assign(rows_, std::vector<std::uint64_t>(cols_, 0));
    }
  }

  bool operator()(const std::vector<std::uint64_t>& x) {
    if (kind_ == FpEquations::Kind::kVanishing) {
      for (const auto& f : compiled_) {
        if (f.eval(x, p_) != 0) return false;
      }
      return true;
    }
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) scratch_[i][j] = jac_[i * cols_ + j].eval(x, p_);
    }
    return rank_mod_p(scratch_, p_) < rank_threshold_;
  }

 private:
  FpEquations::Kind kind_;
  unsigned long p_;
  std::vector<FpForm> compiled_;
  std::vector<FpForm> jac_;
  std::vector<std::vector<std::uint64_t>> scratch_;
  int rank_threshold_ = 0, rows_ = 0, cols_ = 0;
};

double wilson_bound(double hits, double trials, bool upper) {
  const double z = 1.959963985;  // 95%
  double phat = hits / trials;
  double z2 = z * z;
  double denom = 1.0 + z2 / trials;
  double center = phat + z2 / (2 * trials);
  double spread = z * std::sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials));
  double v = (center + (upper ? spread : -spread)) / denom;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

FpEquations FpEquations::vanishing(std::vector<Form> eqs) {
  if (eqs.empty()) throw std::invalid_argument("need at least one equation");
  FpEquations out;
  out.kind = Kind::kVanishing;
  out.n_vars = eqs.front().n_vars();
  for (const Form& f : eqs) {
    if (f.n_vars() != out.n_vars) throw std::invalid_argument("mixed variable counts");
  }
  out.forms = std::move(eqs);
  return out;
}

FpEquations FpEquations::jacobian_rank_below(const FormSystem& sys) {
  FpEquations out;
  out.kind = Kind::kJacobianRankBelow;
  out.forms = sys.forms();
  out.n_vars = sys.n_vars();
  out.rank_threshold = sys.r();
  return out;
}

FpDimensionEstimate variety_dimension_fp(const FpEquations& eqs,
                                         const std::vector<unsigned long>& primes,
                                         const FpOptions& opt) {
  if (primes.empty()) throw std::invalid_argument("need at least one prime");
  int n = eqs.n_vars;
  FpDimensionEstimate est;
  est.method = "fp-point-count";

  for (unsigned long p : primes) {
    if (p < 2) throw std::invalid_argument("primes must be >= 2");
    // Bad reduction: a nonzero equation whose coefficients all vanish mod p
    // would spuriously cut nothing.
    bool bad = false;
    for (const Form& f : eqs.forms) {
      if (f.is_zero()) continue;
      bool all_zero = true;
      for (const auto& [exp, c] : f.terms()) {
        if (c % static_cast<long>(p) != 0) {
          all_zero = false;
          break;
        }
      }
      if (all_zero) bad = true;
    }
    if (bad) {
      est.skipped_primes.push_back(p);
      continue;
    }

    FpPrimeCount pc;
    pc.p = p;
    double pn = std::pow(static_cast<double>(p), n);
    bool exact = pn <= static_cast<double>(opt.exact_threshold);
    pc.exact = exact;
    FpPredicate pred(eqs, p);
    std::vector<std::uint64_t> x(n, 0);
    if (exact) {
      unsigned long long count = 0;
      for (;;) {
        if (pred(x)) ++count;
        int j = 0;
        while (j < n && ++x[j] == p) x[j++] = 0;
        if (j == n) break;
      }
      pc.count = static_cast<double>(count);
    } else {
      std::mt19937_64 gen(opt.seed ^ (p * 0x9E3779B97F4A7C15ULL));
      unsigned long long hits = 0;
      for (unsigned long long t = 0; t < opt.trials; ++t) {
        for (int j = 0; j < n; ++j) x[j] = gen() % p;
        if (pred(x)) ++hits;
      }
      pc.hits = hits;
      pc.trials = opt.trials;
      pc.count = static_cast<double>(hits) / static_cast<double>(opt.trials) * pn;
    }
    double logp = std::log(static_cast<double>(p));
    pc.log_p_count = pc.count > 0 ? std::log(pc.count) / logp : -1.0;
    if (!exact) {
      double lo = wilson_bound(static_cast<double>(pc.hits), static_cast<double>(pc.trials), false);
      double hi = wilson_bound(static_cast<double>(pc.hits), static_cast<double>(pc.trials), true);
      pc.wilson_log_lo = lo > 0 ? std::log(lo * pn) / logp : -1.0;
      pc.wilson_log_hi = hi > 0 ? std::log(hi * pn) / logp : -1.0;
    } else {
      pc.wilson_log_lo = pc.wilson_log_hi = pc.log_p_count;
    }
    est.per_prime.push_back(pc);
  }

  if (est.per_prime.empty()) {
    throw std::domain_error("all primes skipped for bad reduction; choose other primes");
  }

  std::vector<double> exps;
  bool any_empty = false;
  for (const auto& pc : est.per_prime) {
    if (pc.log_p_count < 0) {
      any_empty = true;
    } else {
      exps.push_back(pc.log_p_count);
    }
  }
  if (exps.empty()) {
    // The affine cone of a homogeneous system always contains the origin, so
    // this signals non-homogeneous input or an unlucky sample.
    est.dim_estimate = -1;
    est.consistent = false;
    return est;
  }
  std::sort(exps.begin(), exps.end());
  double median = exps.size() % 2 ? exps[exps.size() / 2]
                                  : (exps[exps.size() / 2 - 1] + exps[exps.size() / 2]) / 2;
  est.dim_estimate = static_cast<int>(std::lround(median));
  est.consistent = !any_empty;
  for (const auto& pc : est.per_prime) {
    if (pc.log_p_count < 0 || std::lround(pc.log_p_count) != est.dim_estimate) {
      est.consistent = false;
    }
    if (!pc.exact) {
      if (pc.wilson_log_lo < 0 || std::lround(pc.wilson_log_lo) != est.dim_estimate ||
          std::lround(pc.wilson_log_hi) != est.dim_estimate) {
        est.consistent = false;
      }
    }
  }
  return est;
}

}  // namespace formlab
