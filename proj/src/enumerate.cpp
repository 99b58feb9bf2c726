#include "formlab/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace formlab {

namespace {

constexpr std::int64_t kInt64SafeBound = std::int64_t{1} << 61;

using u128 = unsigned __int128;

u128 subtree_points(const std::vector<IntRange>& ranges, int from) {
  u128 total = 1;
  for (std::size_t j = from; j < ranges.size(); ++j) {
    auto sz = static_cast<u128>(ranges[j].size());
    if (sz != 0 && total > (u128(1) << 100) / sz) {
      throw EnumerationCapError("lattice subtree too large to count in 128 bits");
    }
    total *= sz;
  }
  return total;
}

template <class T>
T make_scalar(std::int64_t v) {
  if constexpr (std::is_same_v<T, Int>) {
    return Int(static_cast<long>(v));
  } else {
    return v;
  }
}

template <class T>
bool is_zero(const T& v) {
  return v == 0;
}

// Static substitution schedule for one form: level k holds the coefficients
// of the polynomial in variables k..n-1 after x_1..x_k were substituted.
template <class T>
struct FormPlan {
  struct Edge {
    int src, dst, e;
  };
  struct Level {
    std::vector<Edge> edges;  // transition into the next level
    int nslots = 0;
    int const_slot = -1;  // slot with all-zero remaining exponents, if any
    int max_e = 0;
    std::vector<T> coeff;
  };

  int n = 0, deg = 0;
  std::vector<Level> levels;       // size n; level n-1 is univariate in x_n
  std::vector<T> powv;             // scratch v^0..v^deg
  std::vector<T> root_coeff;       // immutable level-0 coefficients

  enum class State { kMixed, kConstZero, kConstNonzero };

  void build(const Form& f) {
    n = f.n_vars();
    deg = f.degree();
    levels.assign(n, {});
    powv.assign(deg + 1, make_scalar<T>(0));

    // patterns[k]: distinct exponent tails (vars k..n-1)
    std::vector<std::vector<Exponents>> patterns(n);
    {
      std::map<Exponents, int> idx;
      for (const auto& [exp, c] : f.terms()) idx.emplace(exp, 0);
      for (auto& [exp, i] : idx) {
        i = static_cast<int>(patterns[0].size());
        patterns[0].push_back(exp);
      }
    }
    for (int k = 0; k + 1 < n; ++k) {
      std::map<Exponents, int> idx;
      for (const auto& p : patterns[k]) {
        Exponents tail(p.begin() + 1, p.end());
        idx.emplace(std::move(tail), 0);
      }
      for (auto& [exp, i] : idx) {
        i = static_cast<int>(patterns[k + 1].size());
        patterns[k + 1].push_back(exp);
      }
      for (std::size_t s = 0; s < patterns[k].size(); ++s) {
        Exponents tail(patterns[k][s].begin() + 1, patterns[k][s].end());
        levels[k].edges.push_back(
            {static_cast<int>(s), idx.at(tail), patterns[k][s][0]});
        levels[k].max_e = std::max(levels[k].max_e, patterns[k][s][0]);
      }
    }
    for (int k = 0; k < n; ++k) {
      levels[k].nslots = static_cast<int>(patterns[k].size());
      for (std::size_t s = 0; s < patterns[k].size(); ++s) {
        const auto& p = patterns[k][s];
        if (std::all_of(p.begin(), p.end(), [](int e) { return e == 0; })) {
          levels[k].const_slot = static_cast<int>(s);
        }
      }
      levels[k].coeff.assign(levels[k].nslots, make_scalar<T>(0));
    }
    // Level n-1 patterns are single exponents; re-index them densely by degree
    // so the leaf array reads as univariate coefficients.
    {
      auto& leaf = levels[n - 1];
      std::vector<int> remap(patterns[n - 1].size());
      for (std::size_t s = 0; s < patterns[n - 1].size(); ++s) remap[s] = patterns[n - 1][s][0];
      if (n >= 2) {
        for (auto& e : levels[n - 2].edges) e.dst = remap[e.dst];
      }
      leaf.nslots = deg + 1;
      leaf.const_slot = 0;
      leaf.coeff.assign(deg + 1, make_scalar<T>(0));
      root_leaf_remap = remap;
    }
    root_coeff.clear();
    if (n == 1) {
      root_coeff.assign(deg + 1, make_scalar<T>(0));
      for (const auto& [exp, c] : f.terms()) {
        root_coeff[exp[0]] = from_int(c);
      }
    } else {
      root_coeff.assign(patterns[0].size(), make_scalar<T>(0));
      for (const auto& [exp, c] : f.terms()) {
        auto it = std::find(patterns[0].begin(), patterns[0].end(), exp);
        root_coeff[it - patterns[0].begin()] = from_int(c);
      }
    }
  }

  std::vector<int> root_leaf_remap;

  static T from_int(const Int& v) {
    if constexpr (std::is_same_v<T, Int>) {
      return v;
    } else {
      if (!v.fits_slong_p()) throw std::overflow_error("coefficient exceeds int64");
      return static_cast<std::int64_t>(v.get_si());
    }
  }

  void load_root() {
    auto& lvl = levels[0];
    if (n == 1) {
      std::copy(root_coeff.begin(), root_coeff.end(), lvl.coeff.begin());
    } else {
      std::copy(root_coeff.begin(), root_coeff.end(), lvl.coeff.begin());
    }
  }

  State classify(int k) const {
    const auto& lvl = levels[k];
    bool const_nonzero = false;
    for (int s = 0; s < lvl.nslots; ++s) {
      if (is_zero(lvl.coeff[s])) continue;
      if (s == lvl.const_slot) {
        const_nonzero = true;
      } else {
        return State::kMixed;
      }
    }
    return const_nonzero ? State::kConstNonzero : State::kConstZero;
  }

  // Substitute x_{k+1} = v, producing the level k+1 coefficients.
  State push(int k, std::int64_t v) {
    const auto& cur = levels[k];
    auto& nxt = levels[k + 1];
    std::fill(nxt.coeff.begin(), nxt.coeff.end(), make_scalar<T>(0));
    powv[0] = make_scalar<T>(1);
    T tv = make_scalar<T>(v);
    for (int e = 1; e <= cur.max_e; ++e) powv[e] = powv[e - 1] * tv;
    for (const auto& edge : cur.edges) {
      if (is_zero(cur.coeff[edge.src])) continue;
      nxt.coeff[edge.dst] += cur.coeff[edge.src] * powv[edge.e];
    }
    return classify(k + 1);
  }
};

template <class T>
T horner(const std::vector<T>& c, int top, std::int64_t v) {
  T tv = make_scalar<T>(v);
  T acc = c[top];
  for (int e = top - 1; e >= 0; --e) acc = acc * tv + c[e];
  return acc;
}

template <class T>
int top_degree(const std::vector<T>& c) {
  for (int e = static_cast<int>(c.size()) - 1; e >= 0; --e) {
    if (!is_zero(c[e])) return e;
  }
  return -1;
}

// Integer roots of the univariate with coefficients c (top nonzero degree
// `top` >= 1) inside [lo, hi], ascending, no duplicates.
template <class T>
void integer_roots(const std::vector<T>& c, int top, std::int64_t lo, std::int64_t hi,
                   std::vector<std::int64_t>* out) {
  out->clear();
  if (lo > hi) return;
  if (top == 1) {
    if constexpr (std::is_same_v<T, Int>) {
      Int num = -c[0];
      if (mpz_divisible_p(num.get_mpz_t(), c[1].get_mpz_t())) {
        Int q = num / c[1];
        if (q.fits_slong_p()) {
          auto v = static_cast<std::int64_t>(q.get_si());
          if (v >= lo && v <= hi) out->push_back(v);
        }
      }
    } else {
      if (c[0] % c[1] == 0) {
        std::int64_t v = -(c[0] / c[1]);
        if (v >= lo && v <= hi) out->push_back(v);
      }
    }
    return;
  }
  if (top == 2) {
    if constexpr (std::is_same_v<T, Int>) {
      Int disc = c[1] * c[1] - 4 * c[2] * c[0];
      if (disc < 0) return;
      if (mpz_perfect_square_p(disc.get_mpz_t())) {
        Int s;
        mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
        for (int pick = 0; pick < (s == 0 ? 1 : 2); ++pick) {
          Int num = -c[1] + (pick == 0 ? s : Int(-s));
          Int den = 2 * c[2];
          if (mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t())) {
            Int q = num / den;
            if (q.fits_slong_p()) {
              auto v = static_cast<std::int64_t>(q.get_si());
              if (v >= lo && v <= hi) out->push_back(v);
            }
          }
        }
      }
      std::sort(out->begin(), out->end());
      return;
    } else {
      __int128 disc = static_cast<__int128>(c[1]) * c[1] - 4 * static_cast<__int128>(c[2]) * c[0];
      std::int64_t s;
      if (!perfect_square_i128(disc, &s)) return;
      for (int pick = 0; pick < (s == 0 ? 1 : 2); ++pick) {
        __int128 num = -static_cast<__int128>(c[1]) + (pick == 0 ? s : -s);
        __int128 den = 2 * static_cast<__int128>(c[2]);
        if (num % den == 0) {
          __int128 q = num / den;
          auto v = static_cast<std::int64_t>(q);
          if (static_cast<__int128>(v) == q && v >= lo && v <= hi) out->push_back(v);
        }
      }
      std::sort(out->begin(), out->end());
      return;
    }
  }
  // Degree >= 3: scan, clipped by the Cauchy root bound 1 + max|c_i|/|c_top|.
  std::int64_t clip_lo = lo, clip_hi = hi;
  if constexpr (std::is_same_v<T, Int>) {
    Int mx = 0;
    for (int e = 0; e < top; ++e) mx = std::max(mx, Int(abs(c[e])));
    Int bound = 1 + mx / abs(c[top]);
    if (bound.fits_slong_p()) {
      auto b = static_cast<std::int64_t>(bound.get_si());
      clip_lo = std::max(clip_lo, -b);
      clip_hi = std::min(clip_hi, b);
    }
  } else {
    std::int64_t mx = 0;
    for (int e = 0; e < top; ++e) mx = std::max(mx, std::abs(c[e]));
    std::int64_t b = 1 + mx / std::abs(c[top]);
    clip_lo = std::max(clip_lo, -b);
    clip_hi = std::min(clip_hi, b);
  }
  for (std::int64_t v = clip_lo; v <= clip_hi; ++v) {
    if (is_zero(horner(c, top, v))) out->push_back(v);
  }
}

template <class T>
class CountEngine {
 public:
  CountEngine(const std::vector<Form>& eqs, std::vector<IntRange> ranges)
      : ranges_(std::move(ranges)) {
    plans_.resize(eqs.size());
    for (std::size_t i = 0; i < eqs.size(); ++i) plans_[i].build(eqs[i]);
    n_ = static_cast<int>(ranges_.size());
  }

  u128 run(std::int64_t lo0, std::int64_t hi0) {
    count_ = 0;
    for (auto& p : plans_) p.load_root();
    std::vector<int> active(plans_.size());
    for (std::size_t i = 0; i < plans_.size(); ++i) active[i] = static_cast<int>(i);
    // Forms already pinned at the root (e.g. n == 1 handled at the leaf).
    if (n_ == 1) {
      leaf(active, lo0, hi0);
      return count_;
    }
    std::vector<int> filtered;
    filtered.reserve(active.size());
    for (int i : active) {
      auto st = plans_[i].classify(0);
      if (st == FormPlan<T>::State::kConstNonzero) return 0;
      if (st == FormPlan<T>::State::kMixed) filtered.push_back(i);
    }
    recurse(0, filtered, lo0, hi0);
    return count_;
  }

 private:
  void recurse(int k, const std::vector<int>& active, std::int64_t lo, std::int64_t hi) {
    if (active.empty()) {
      count_ += static_cast<u128>(hi < lo ? 0 : hi - lo + 1) * subtree_points(ranges_, k + 1);
      return;
    }
    std::vector<int> next;
    next.reserve(active.size());
    for (std::int64_t v = lo; v <= hi; ++v) {
      next.clear();
      bool prune = false;
      for (int i : active) {
        auto st = plans_[i].push(k, v);
        if (st == FormPlan<T>::State::kConstNonzero) {
          prune = true;
          break;
        }
        if (st == FormPlan<T>::State::kMixed) next.push_back(i);
      }
      if (prune) continue;
      if (next.empty()) {
        count_ += subtree_points(ranges_, k + 1);
      } else if (k + 1 == n_ - 1) {
        leaf(next, ranges_[k + 1].lo, ranges_[k + 1].hi);
      } else {
        recurse(k + 1, next, ranges_[k + 1].lo, ranges_[k + 1].hi);
      }
    }
  }

  void leaf(const std::vector<int>& active, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) return;
    // Univariate stage: solve instead of scanning.
    int best = -1, best_deg = 0;
    small_.clear();
    for (int i : active) {
      const auto& c = plans_[i].levels[n_ - 1].coeff;
      int top = top_degree(c);
      if (top == -1) continue;  // identically zero: satisfied
      if (top == 0) return;     // pinned nonzero: no solutions
      small_.push_back(i);
      if (best == -1 || top < best_deg) {
        best = i;
        best_deg = top;
      }
    }
    if (best == -1) {
      count_ += static_cast<u128>(hi - lo + 1);
      return;
    }
    integer_roots(plans_[best].levels[n_ - 1].coeff, best_deg, lo, hi, &roots_);
    for (std::int64_t v : roots_) {
      bool ok = true;
      for (int i : small_) {
        if (i == best) continue;
        const auto& c = plans_[i].levels[n_ - 1].coeff;
        if (!is_zero(horner(c, top_degree(c), v))) {
          ok = false;
          break;
        }
      }
      if (ok) ++count_;
    }
  }

  std::vector<FormPlan<T>> plans_;
  std::vector<IntRange> ranges_;
  int n_ = 0;
  u128 count_ = 0;
  std::vector<std::int64_t> roots_;
  std::vector<int> small_;
};

template <class T>
class SpectrumEngine {
 public:
  SpectrumEngine(const std::vector<Form>& forms, const std::vector<Int>& weights,
                 unsigned long modulus, std::vector<IntRange> ranges)
      : ranges_(std::move(ranges)), q_(modulus) {
    plans_.resize(forms.size());
    for (std::size_t i = 0; i < forms.size(); ++i) plans_[i].build(forms[i]);
    n_ = static_cast<int>(ranges_.size());
    w_.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      Int m = weights[i] % static_cast<long>(q_);
      if (m < 0) m += static_cast<long>(q_);
      w_[i] = m.get_ui();
    }
    counts_.assign(q_, 0);
  }

  std::vector<unsigned long long> run(std::int64_t lo0, std::int64_t hi0) {
    std::fill(counts_.begin(), counts_.end(), 0ULL);
    for (auto& p : plans_) p.load_root();
    recurse(0, lo0, hi0);
    return counts_;
  }

 private:
  void recurse(int k, std::int64_t lo, std::int64_t hi) {
    if (k == n_ - 1) {
      for (std::int64_t v = lo; v <= hi; ++v) {
        unsigned long m = 0;
        for (std::size_t i = 0; i < plans_.size(); ++i) {
          const auto& c = plans_[i].levels[n_ - 1].coeff;
          int top = top_degree(c);
          unsigned long fv;
          if (top == -1) {
            fv = 0;
          } else if constexpr (std::is_same_v<T, Int>) {
            Int val = horner(c, top, v) % static_cast<long>(q_);
            if (val < 0) val += static_cast<long>(q_);
            fv = val.get_ui();
          } else {
            auto val = static_cast<std::int64_t>(horner(c, top, v) % static_cast<std::int64_t>(q_));
            if (val < 0) val += static_cast<std::int64_t>(q_);
            fv = static_cast<unsigned long>(val);
          }
          m = (m + w_[i] * fv) % q_;
        }
        ++counts_[m];
      }
      return;
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      for (auto& p : plans_) p.push(k, v);
      recurse(k + 1, ranges_[k + 1].lo, ranges_[k + 1].hi);
    }
  }

  std::vector<FormPlan<T>> plans_;
  std::vector<IntRange> ranges_;
  int n_ = 0;
  unsigned long q_;
  std::vector<unsigned long> w_;
  std::vector<unsigned long long> counts_;
};

template <class T>
class PhaseEngine {
 public:
  PhaseEngine(const std::vector<Form>& forms, const std::vector<double>& theta,
              std::vector<IntRange> ranges)
      : ranges_(std::move(ranges)), theta_(theta) {
    plans_.resize(forms.size());
    for (std::size_t i = 0; i < forms.size(); ++i) plans_[i].build(forms[i]);
    n_ = static_cast<int>(ranges_.size());
  }

  std::pair<double, double> run(std::int64_t lo0, std::int64_t hi0) {
    re_ = im_ = cre_ = cim_ = 0.0;
    for (auto& p : plans_) p.load_root();
    recurse(0, lo0, hi0);
    return {re_, im_};
  }

 private:
  void add(double x, double y) {
    // Kahan on both components
    double tx = x - cre_;
    double sx = re_ + tx;
    cre_ = (sx - re_) - tx;
    re_ = sx;
    double ty = y - cim_;
    double sy = im_ + ty;
    cim_ = (sy - im_) - ty;
    im_ = sy;
  }

  void recurse(int k, std::int64_t lo, std::int64_t hi) {
    if (k == n_ - 1) {
      for (std::int64_t v = lo; v <= hi; ++v) {
        double phase = 0.0;
        for (std::size_t i = 0; i < plans_.size(); ++i) {
          const auto& c = plans_[i].levels[n_ - 1].coeff;
          int top = top_degree(c);
          if (top == -1) continue;
          T val = horner(c, top, v);
          double fv;
          if constexpr (std::is_same_v<T, Int>) {
            fv = val.get_d();
          } else {
            fv = static_cast<double>(val);
          }
          phase += theta_[i] * fv;
        }
        phase -= std::floor(phase);
        add(std::cos(2 * M_PI * phase), std::sin(2 * M_PI * phase));
      }
      return;
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      for (auto& p : plans_) p.push(k, v);
      recurse(k + 1, ranges_[k + 1].lo, ranges_[k + 1].hi);
    }
  }

  std::vector<FormPlan<T>> plans_;
  std::vector<IntRange> ranges_;
  std::vector<double> theta_;
  int n_ = 0;
  double re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

bool int64_path_ok(const std::vector<Form>& forms, const std::vector<IntRange>& ranges) {
  for (const Form& f : forms) {
    if (value_bound(f, ranges) >= kInt64SafeBound) return false;
  }
  return true;
}

std::vector<std::pair<std::int64_t, std::int64_t>> split_range(const IntRange& r, int pieces) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t total = r.size();
  if (total <= 0) return out;
  pieces = static_cast<int>(std::min<std::int64_t>(pieces, total));
  std::int64_t base = total / pieces, extra = total % pieces;
  std::int64_t lo = r.lo;
  for (int i = 0; i < pieces; ++i) {
    std::int64_t len = base + (i < extra ? 1 : 0);
    out.emplace_back(lo, lo + len - 1);
    lo += len;
  }
  return out;
}

}  // namespace

std::vector<IntRange> dilated_box_ranges(const Box& box, const Rat& P) {
  if (P < 1) throw std::invalid_argument("dilation parameter P must be >= 1");
  std::vector<IntRange> out;
  out.reserve(box.n_vars());
  for (const auto& [lo, hi] : box.intervals()) {
    out.push_back({ceil_to_i64(Rat(lo * P)), floor_to_i64(Rat(hi * P))});
  }
  return out;
}

Int box_point_total(const std::vector<IntRange>& ranges) {
  Int total = 1;
  for (const auto& r : ranges) total *= Int(static_cast<long>(r.size()));
  return total;
}

Int value_bound(const Form& f, const std::vector<IntRange>& ranges) {
  if (static_cast<int>(ranges.size()) != f.n_vars()) {
    throw std::invalid_argument("dimension mismatch");
  }
  Int bound = 0;
  for (const auto& [exp, coeff] : f.terms()) {
    Int term = abs(coeff);
    for (int j = 0; j < f.n_vars(); ++j) {
      Int b = std::max<long>({std::labs(ranges[j].lo), std::labs(ranges[j].hi), 1L});
      term *= pow_int(b, exp[j]);
    }
    bound += term;
  }
  return bound;
}

Int count_common_zeros(const std::vector<Form>& eqs, const std::vector<IntRange>& ranges,
                       int workers) {
  if (eqs.empty()) {
    Int total = box_point_total(ranges);
    return total;
  }
  for (const Form& f : eqs) {
    if (static_cast<int>(ranges.size()) != f.n_vars()) {
      throw std::invalid_argument("dimension mismatch");
    }
  }
  for (const auto& r : ranges) {
    if (r.size() == 0) return 0;
  }
  std::vector<Form> live;
  for (const Form& f : eqs) {
    if (!f.is_zero()) live.push_back(f);
  }
  if (live.empty()) return box_point_total(ranges);

  bool fast = int64_path_ok(live, ranges);
  auto chunks = split_range(ranges.front(), std::max(1, workers));
  std::vector<u128> partial(chunks.size(), 0);
  auto work = [&](std::size_t idx) {
    if (fast) {
      CountEngine<std::int64_t> engine(live, ranges);
      partial[idx] = engine.run(chunks[idx].first, chunks[idx].second);
    } else {
      CountEngine<Int> engine(live, ranges);
      partial[idx] = engine.run(chunks[idx].first, chunks[idx].second);
    }
  };
  if (chunks.size() <= 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < chunks.size(); ++i) pool.emplace_back(work, i);
    work(0);
    for (auto& t : pool) t.join();
  }
  u128 total = 0;
  for (u128 c : partial) total += c;
  Int result = 0;
  Int shift = pow_int(2, 64);
  result = Int(static_cast<unsigned long>(total >> 64)) * shift +
           Int(static_cast<unsigned long>(total & ~0ULL));
  return result;
}

std::vector<unsigned long long> residue_spectrum(const std::vector<Form>& forms,
                                                 const std::vector<Int>& weights,
                                                 unsigned long modulus,
                                                 const std::vector<IntRange>& ranges,
                                                 int workers, const Int& point_cap) {
  if (modulus == 0) throw std::invalid_argument("modulus must be positive");
  if (forms.size() != weights.size()) throw std::invalid_argument("weights/forms mismatch");
  Int total = box_point_total(ranges);
  if (total > point_cap) {
    throw EnumerationCapError("residue enumeration over " + total.get_str() +
                              " points exceeds the cap " + point_cap.get_str());
  }
  if (total == 0) return std::vector<unsigned long long>(modulus, 0);
  std::vector<Form> live;
  std::vector<Int> live_w;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (!forms[i].is_zero()) {
      live.push_back(forms[i]);
      live_w.push_back(weights[i]);
    }
  }
  if (live.empty()) {
    std::vector<unsigned long long> counts(modulus, 0);
    counts[0] = total.get_ui();
    return counts;
  }

  bool fast = int64_path_ok(live, ranges);
  auto chunks = split_range(ranges.front(), std::max(1, workers));
  std::vector<std::vector<unsigned long long>> partial(chunks.size());
  auto work = [&](std::size_t idx) {
    if (fast) {
      SpectrumEngine<std::int64_t> engine(live, live_w, modulus, ranges);
      partial[idx] = engine.run(chunks[idx].first, chunks[idx].second);
    } else {
      SpectrumEngine<Int> engine(live, live_w, modulus, ranges);
      partial[idx] = engine.run(chunks[idx].first, chunks[idx].second);
    }
  };
  if (chunks.size() <= 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < chunks.size(); ++i) pool.emplace_back(work, i);
    work(0);
    for (auto& t : pool) t.join();
  }
  std::vector<unsigned long long> counts(modulus, 0);
  for (const auto& part : partial) {
    for (unsigned long m = 0; m < modulus; ++m) counts[m] += part.empty() ? 0 : part[m];
  }
  return counts;
}

std::pair<double, double> phase_sum_float(const std::vector<Form>& forms,
                                          const std::vector<double>& theta,
                                          const std::vector<IntRange>& ranges, int workers,
                                          const Int& point_cap) {
  if (forms.size() != theta.size()) throw std::invalid_argument("theta/forms mismatch");
  Int total = box_point_total(ranges);
  if (total > point_cap) {
    throw EnumerationCapError("phase-sum enumeration over " + total.get_str() +
                              " points exceeds the cap " + point_cap.get_str());
  }
  if (total == 0) return {0.0, 0.0};
  bool fast = int64_path_ok(forms, ranges);
  // Fixed 64-way partition: the reduction order never depends on the worker
  // count, so the result is reproducible bit for bit.
  auto chunks = split_range(ranges.front(), 64);
  std::vector<std::pair<double, double>> partial(chunks.size(), {0.0, 0.0});
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= chunks.size()) return;
      if (fast) {
        PhaseEngine<std::int64_t> engine(forms, theta, ranges);
        partial[idx] = engine.run(chunks[idx].first, chunks[idx].second);
      } else {
        PhaseEngine<Int> engine(forms, theta, ranges);
        partial[idx] = engine.run(chunks[idx].first, chunks[idx].second);
      }
    }
  };
  int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(chunks.size())));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  double re = 0, im = 0;
  for (const auto& [x, y] : partial) {
    re += x;
    im += y;
  }
  return {re, im};
}

}  // namespace formlab
