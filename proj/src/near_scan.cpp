#include "near_scan.hpp"

#include <algorithm>
#include <array>

namespace formlab::detail {

namespace {

constexpr std::int64_t kInt64SafeBound = std::int64_t{1} << 61;

struct CompiledTerm {
  std::int64_t c;
  std::vector<int> vars;  // variable indices, repeated by exponent
};

std::vector<CompiledTerm> compile_i64(const Form& f) {
  std::vector<CompiledTerm> out;
  for (const auto& [exp, coeff] : f.terms()) {
    CompiledTerm t;
    t.c = static_cast<std::int64_t>(coeff.get_si());
    for (int j = 0; j < f.n_vars(); ++j) {
      for (int e = 0; e < exp[j]; ++e) t.vars.push_back(j);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::int64_t eval_i64(const std::vector<CompiledTerm>& terms, const std::int64_t* x) {
  std::int64_t acc = 0;
  for (const auto& t : terms) {
    std::int64_t m = t.c;
    for (int v : t.vars) m *= x[v];
    acc += m;
  }
  return acc;
}

Int eval_mpz(const Form& f, const std::vector<Int>& x) { return f.evaluate(x); }

}  // namespace

NearScan::NearScan(const FormSystem& sys, std::vector<Rat> alpha, Int tuple_bound,
                   PowThreshold threshold)
    : sys_(sys), alpha_(std::move(alpha)), threshold_(std::move(threshold)) {
  if (sys.degree() < 2) throw std::invalid_argument("near-solution scan needs degree >= 2");
  if (static_cast<int>(alpha_.size()) != sys.r()) {
    throw std::invalid_argument("alpha length != r");
  }
  if (tuple_bound < 0) tuple_bound = 0;
  if (!tuple_bound.fits_slong_p()) {
    throw EnumerationCapError("tuple bound " + tuple_bound.get_str() + " is unworkably large");
  }
  bound_ = static_cast<std::int64_t>(tuple_bound.get_si());
  dims_ = sys.n_vars() * (sys.degree() - 1);

  q_common_ = 1;
  for (const Rat& a : alpha_) {
    Int den = a.get_den();
    mpz_lcm(q_common_.get_mpz_t(), q_common_.get_mpz_t(), den.get_mpz_t());
  }
  for (const Rat& a : alpha_) {
    Rat w = a * Rat(q_common_);
    weights_.push_back(w.get_num());
  }

  int n = sys.n_vars();
  grad_.resize(sys.r());
  Int max_bound = 0;
  std::vector<IntRange> sum_box(n);
  std::int64_t reach = bound_ * (sys.degree() - 1);
  for (auto& r : sum_box) r = {-reach, reach};
  for (int i = 0; i < sys.r(); ++i) {
    for (int j = 1; j <= n; ++j) {
      grad_[i].push_back(sys.form(i + 1).partial(j));
      max_bound = std::max(max_bound, value_bound(grad_[i].back(), sum_box));
    }
  }
  Int gamma_bound = max_bound * ((Int(1) << (sys.degree() - 1)) - 1);
  int64_ok_ = gamma_bound < kInt64SafeBound && q_common_ < (Int(1) << 31);
}

template <class T>
unsigned long long NearScan::scan_impl(
    const std::function<bool(const std::vector<std::int64_t>&, const IMat&)>* visit) const {
  int n = sys_.n_vars();
  int r = sys_.r();
  int d = sys_.degree();
  int groups = d - 1;
  unsigned masks = (1u << groups) - 1;

  // Exact threshold comparison: dist/Q < p/q  <=>  dist * q < p * Q.
  bool exact_th = threshold_.is_exact();
  Int th_num, th_rhs;
  std::int64_t th_den_i64 = 0, th_rhs_i64 = -1;
  if (exact_th) {
    const Rat& t = threshold_.exact_value();
    th_num = t.get_num();
    th_rhs = th_num * q_common_;
    Int den = t.get_den();
    if (den.fits_slong_p() && th_rhs.fits_slong_p()) {
      th_den_i64 = den.get_si();
      th_rhs_i64 = th_rhs.get_si();
    }
  }

  std::vector<std::vector<CompiledTerm>> cgrad;
  if constexpr (std::is_same_v<T, std::int64_t>) {
    cgrad.resize(r * n);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < n; ++j) cgrad[i * n + j] = compile_i64(grad_[i][j]);
    }
  }

  // u64 modular products need q^2 < 2^64; larger denominators take the
  // big-integer accumulation below.
  std::uint64_t q_u64 = 0;
  std::vector<std::uint64_t> w_mod(r);
  if (q_common_ < (Int(1) << 31)) {
    q_u64 = q_common_.get_ui();
    for (int i = 0; i < r; ++i) {
      Int m = weights_[i] % q_common_;
      if (m < 0) m += q_common_;
      w_mod[i] = m.get_ui();
    }
  }

  std::vector<std::array<int, 2>> mask_step(masks + 1);  // (previous mask, group added)
  for (unsigned m = 1; m <= masks; ++m) {
    unsigned low = m & (m - 1);
    int grp = __builtin_ctz(m ^ low);
    mask_step[m] = {static_cast<int>(low), grp};
  }
  std::vector<int> sign(masks + 1);
  for (unsigned m = 1; m <= masks; ++m) {
    sign[m] = ((groups - __builtin_popcount(m)) % 2 == 0) ? 1 : -1;
  }

  std::vector<std::vector<T>> sums(masks + 1, std::vector<T>(n));
  std::vector<std::vector<T>> gamma(r, std::vector<T>(n));
  IMat gamma_out(r, std::vector<Int>(n));

  unsigned long long found = 0;
  auto per_tuple = [&](const std::vector<std::int64_t>& x) {
    // subset sums over the d-1 vector groups
    for (unsigned m = 1; m <= masks; ++m) {
      auto [prev, grp] = mask_step[m];
      for (int c = 0; c < n; ++c) {
        T add;
        if constexpr (std::is_same_v<T, Int>) {
          add = Int(static_cast<long>(x[grp * n + c]));
        } else {
          add = x[grp * n + c];
        }
        sums[m][c] = (prev == 0 ? add : sums[prev][c] + add);
      }
    }
    for (int j = 0; j < n; ++j) {
      // gamma[i][j] and the distance condition for this j
      std::uint64_t acc = 0;
      Int acc_big = 0;
      for (int i = 0; i < r; ++i) {
        T g{};
        for (unsigned m = 1; m <= masks; ++m) {
          T v;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            v = eval_i64(cgrad[i * n + j], sums[m].data());
          } else {
            v = eval_mpz(grad_[i][j], sums[m]);
          }
          g += sign[m] > 0 ? v : T(-v);
        }
        gamma[i][j] = g;
        if (q_u64 != 0) {
          std::uint64_t gm;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            std::int64_t t = g % static_cast<std::int64_t>(q_u64);
            if (t < 0) t += static_cast<std::int64_t>(q_u64);
            gm = static_cast<std::uint64_t>(t);
          } else {
            Int t = g % q_common_;
            if (t < 0) t += q_common_;
            gm = t.get_ui();
          }
          acc = (acc + w_mod[i] % q_u64 * gm) % q_u64;
        } else {
          Int gi;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            gi = Int(static_cast<long>(g));
          } else {
            gi = g;
          }
          acc_big += weights_[i] * gi;
        }
      }
      Int dist;
      if (q_u64 != 0) {
        std::uint64_t m = acc;
        std::uint64_t dd = std::min(m, q_u64 - m);
        if (m == 0) dd = 0;
        // fast exact comparison when everything fits in 64 bits
        if (exact_th && th_rhs_i64 >= 0) {
          __int128 lhs = static_cast<__int128>(dd) * th_den_i64;
          if (!(lhs < th_rhs_i64)) return true;  // condition fails; next tuple
          continue;
        }
        dist = Int(static_cast<unsigned long>(dd));
      } else {
        Int m = acc_big % q_common_;
        if (m < 0) m += q_common_;
        dist = std::min(m, Int(q_common_ - m));
      }
      if (exact_th) {
        if (!(dist * Int(threshold_.exact_value().get_den()) < th_rhs)) return true;
      } else {
        Rat dr(dist, q_common_);
        dr.canonicalize();
        if (!threshold_.less_than(dr)) return true;
      }
    }
    ++found;
    if (visit) {
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < n; ++j) {
          if constexpr (std::is_same_v<T, Int>) {
            gamma_out[i][j] = gamma[i][j];
          } else {
            gamma_out[i][j] = Int(static_cast<long>(gamma[i][j]));
          }
        }
      }
      if (!(*visit)(x, gamma_out)) return false;
    }
    return true;
  };

  for_each_graded_tuple(dims_, bound_, per_tuple);
  return found;
}

unsigned long long NearScan::scan(
    const std::function<bool(const std::vector<std::int64_t>&, const IMat&)>& visit) const {
  return int64_ok_ ? scan_impl<std::int64_t>(&visit) : scan_impl<Int>(&visit);
}

unsigned long long NearScan::count() const {
  return int64_ok_ ? scan_impl<std::int64_t>(nullptr) : scan_impl<Int>(nullptr);
}

}  // namespace formlab::detail
