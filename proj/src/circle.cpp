#include "formlab/circle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "formlab/enumerate.hpp"

namespace formlab {

namespace {

struct Kahan {
  double s = 0, c = 0;
  void add(double x) {
    double t = x - c;
    double u = s + t;
    c = (u - s) - t;
    s = u;
  }
};

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

Form project_to_block(const Form& f, const std::vector<int>& block) {
  // Monomials supported inside the block, reindexed to block coordinates.
  std::vector<int> pos(f.n_vars(), -1);
  for (std::size_t i = 0; i < block.size(); ++i) pos[block[i]] = static_cast<int>(i);
  std::vector<std::pair<Exponents, Int>> terms;
  for (const auto& [exp, coeff] : f.terms()) {
    bool inside = true;
    Exponents proj(block.size(), 0);
    for (int j = 0; j < f.n_vars(); ++j) {
      if (exp[j] == 0) continue;
      if (pos[j] == -1) {
        inside = false;
        break;
      }
      proj[pos[j]] = exp[j];
    }
    if (inside) terms.emplace_back(std::move(proj), coeff);
  }
  if (terms.empty()) return Form::zero(static_cast<int>(block.size()), f.degree());
  return Form::from_terms(static_cast<int>(block.size()), terms);
}

// Joint residue classes of (f_1,...,f_r) mod q over one block, encoded in
// base q: class = sum_i (f_i mod q) * q^(i-1). Computed once per (q, block)
// and reused for every phase tuple a.
struct BlockClassCounts {
  unsigned long q = 1;
  int r = 1;
  std::vector<unsigned long long> counts;  // size q^r

  std::complex<double> phase_sum(const std::vector<unsigned long>& a_mod) const {
    Kahan re, im;
    int rr = r;
    for (std::size_t cls = 0; cls < counts.size(); ++cls) {
      if (counts[cls] == 0) continue;
      std::size_t rest = cls;
      unsigned long m = 0;
      for (int i = 0; i < rr; ++i) {
        unsigned long vi = rest % q;
        rest /= q;
        m = (m + a_mod[i] * vi) % q;
      }
      double ang = 2 * M_PI * static_cast<double>(m) / static_cast<double>(q);
      double cnt = static_cast<double>(counts[cls]);
      re.add(cnt * std::cos(ang));
      im.add(cnt * std::sin(ang));
    }
    return {re.s, im.s};
  }
};

std::vector<BlockClassCounts> block_class_counts(const FormSystem& sys, unsigned long q,
                                                 const std::vector<std::vector<int>>& blocks,
                                                 const CircleOptions& opt) {
  int r = sys.r();
  double qr = std::pow(static_cast<double>(q), r);
  if (qr > 4e9) {
    throw EnumerationCapError("q^r residue classes exceed the table cap");
  }
  auto modulus = static_cast<unsigned long>(qr);
  std::vector<Int> weights(r);
  for (int i = 0; i < r; ++i) weights[i] = pow_int(Int(static_cast<long>(q)), i);

  std::vector<BlockClassCounts> out;
  for (const auto& block : blocks) {
    std::vector<Form> proj;
    for (const Form& f : sys.forms()) proj.push_back(project_to_block(f, block));
    std::vector<IntRange> ranges(block.size(), IntRange{0, static_cast<std::int64_t>(q) - 1});
    BlockClassCounts bc;
    bc.q = q;
    bc.r = r;
    bc.counts = residue_spectrum(proj, weights, modulus, ranges, opt.workers,
                                 opt.block_point_cap);
    out.push_back(std::move(bc));
  }
  return out;
}

std::vector<unsigned long> reduce_mod(const std::vector<Int>& a, unsigned long q) {
  std::vector<unsigned long> out;
  for (const Int& v : a) {
    Int m = v % static_cast<long>(q);
    if (m < 0) m += static_cast<long>(q);
    out.push_back(m.get_ui());
  }
  return out;
}

double form_coefficient_mass(const Form& f) {
  double s = 0;
  for (const auto& [exp, c] : f.terms()) s += std::abs(c.get_d());
  return s;
}

double eval_double(const Form& f, const std::vector<double>& x) {
  double acc = 0;
  for (const auto& [exp, c] : f.terms()) {
    double m = c.get_d();
    for (int j = 0; j < f.n_vars(); ++j) {
      for (int e = 0; e < exp[j]; ++e) m *= x[j];
    }
    acc += m;
  }
  return acc;
}

}  // namespace

std::vector<std::vector<int>> variable_blocks(const std::vector<Form>& forms, int n_vars) {
  std::vector<int> parent(n_vars);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Form& f : forms) {
    for (const auto& [exp, c] : f.terms()) {
      int first = -1;
      for (int j = 0; j < n_vars; ++j) {
        if (exp[j] == 0) continue;
        if (first == -1) {
          first = j;
        } else {
          parent[find_root(parent, j)] = find_root(parent, first);
        }
      }
    }
  }
  std::vector<std::vector<int>> blocks(n_vars);
  for (int j = 0; j < n_vars; ++j) blocks[find_root(parent, j)].push_back(j);
  std::vector<std::vector<int>> out;
  for (auto& b : blocks) {
    if (!b.empty()) out.push_back(std::move(b));
  }
  return out;
}

std::complex<double> complete_exponential_sum_mod_q(const FormSystem& sys,
                                                    const std::vector<Int>& a, unsigned long q,
                                                    const CircleOptions& opt) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  if (static_cast<int>(a.size()) != sys.r()) throw std::invalid_argument("a length != r");
  Int g = Int(static_cast<long>(q));
  for (const Int& v : a) {
      Int av = abs(v);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), av.get_mpz_t());
    }
  if (g != 1) throw std::invalid_argument("gcd(q, a_1, ..., a_r) must be 1");
  if (q == 1) return {1.0, 0.0};

  auto blocks = variable_blocks(sys.forms(), sys.n_vars());
  auto spectra = block_class_counts(sys, q, blocks, opt);
  auto a_mod = reduce_mod(a, q);
  std::complex<double> s{1.0, 0.0};
  for (const auto& bc : spectra) s *= bc.phase_sum(a_mod);
  return s;
}

SingularSeriesTruncation singular_series(const FormSystem& sys, unsigned long q_max,
                                         const CircleOptions& opt) {
  if (q_max < 1) throw std::invalid_argument("Q_max must be >= 1");
  int r = sys.r();
  int n = sys.n_vars();
  auto blocks = variable_blocks(sys.forms(), sys.n_vars());

  SingularSeriesTruncation out;
  out.q_max = q_max;
  Kahan total;
  for (unsigned long q = 1; q <= q_max; ++q) {
    double term;
    if (q == 1) {
      term = 1.0;  // the single residue tuple a = 0 contributes S_{0,1} = 1
    } else {
      auto spectra = block_class_counts(sys, q, blocks, opt);
      Kahan re, im;
      std::vector<unsigned long> a(r, 0);
      for (;;) {
        // joint gcd over the tuple and q
        unsigned long g = q;
        for (int i = 0; i < r; ++i) g = std::gcd(g, a[i]);
        if (g == 1) {
          std::complex<double> s{1.0, 0.0};
          for (const auto& bc : spectra) s *= bc.phase_sum(a);
          re.add(s.real());
          im.add(s.imag());
        }
        int i = 0;
        while (i < r && ++a[i] == q) a[i++] = 0;
        if (i == r) break;
      }
      double scale = std::pow(static_cast<double>(q), -n);
      term = re.s * scale;
      out.max_imag = std::max(out.max_imag, std::abs(im.s) * scale);
    }
    out.terms.push_back(term);
    total.add(term);
    out.partial_sums.emplace_back(q, total.s);
  }
  out.value = total.s;

  auto decade_start = static_cast<unsigned long>(std::ceil(0.9 * q_max));
  double lo = out.value, hi = out.value;
  for (const auto& [q, cum] : out.partial_sums) {
    if (q >= decade_start) {
      lo = std::min(lo, cum);
      hi = std::max(hi, cum);
    }
  }
  out.tail_estimate = hi - lo;
  return out;
}

std::complex<double> oscillatory_box_integral(const FormSystem& sys, const Box& box,
                                              const std::vector<double>& gamma, int grid,
                                              const CircleOptions& opt) {
  if (static_cast<int>(gamma.size()) != sys.r()) throw std::invalid_argument("gamma length != r");
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  auto blocks = variable_blocks(sys.forms(), sys.n_vars());

  std::complex<double> total{1.0, 0.0};
  for (const auto& block : blocks) {
    std::vector<Form> proj;
    for (const Form& f : sys.forms()) proj.push_back(project_to_block(f, block));
    int dims = static_cast<int>(block.size());
    std::vector<double> lo(dims), width(dims);
    std::vector<int> cells(dims);
    double cell_total = 1;
    for (int t = 0; t < dims; ++t) {
      const auto& iv = box.intervals()[block[t]];
      lo[t] = iv.first.get_d();
      width[t] = Rat(iv.second - iv.first).get_d();
      // per-cell phase increment below pi/16: |gamma . df/dx_t| * h < pi/16
      double k = 0;
      for (int i = 0; i < sys.r(); ++i) {
        if (proj[i].is_zero()) continue;
        // coefficient mass of the partial bounds |d(phase)/dx_t| on [-1,1]^n
        k += std::abs(gamma[i]) * form_coefficient_mass(proj[i].partial(t + 1));
      }
      int g = std::max<int>(grid, static_cast<int>(std::ceil(width[t] * k * 16 / M_PI)));
      cells[t] = std::max(1, g);
      cell_total *= cells[t];
    }
    if (cell_total > opt.inner_cell_cap) {
      throw EnumerationCapError("inner quadrature grid exceeds the cell cap");
    }

    Kahan re, im;
    std::vector<int> idx(dims, 0);
    std::vector<double> x(dims);
    double vol_cell = 1;
    for (int t = 0; t < dims; ++t) vol_cell *= width[t] / cells[t];
    for (;;) {
      for (int t = 0; t < dims; ++t) {
        x[t] = lo[t] + (idx[t] + 0.5) * width[t] / cells[t];
      }
      double phase = 0;
      for (int i = 0; i < sys.r(); ++i) {
        if (!proj[i].is_zero() && gamma[i] != 0) phase += gamma[i] * eval_double(proj[i], x);
      }
      re.add(vol_cell * std::cos(2 * M_PI * phase));
      im.add(vol_cell * std::sin(2 * M_PI * phase));
      int t = 0;
      while (t < dims && ++idx[t] == cells[t]) idx[t++] = 0;
      if (t == dims) break;
    }
    total *= std::complex<double>{re.s, im.s};
  }
  return total;
}

SingularIntegralTruncation singular_integral(const FormSystem& sys, const Box& box,
                                             double t_max, int grid,
                                             const CircleOptions& opt) {
  if (t_max <= 0) throw std::invalid_argument("T_max must be positive");
  if (grid < 16) throw std::invalid_argument("grid must be >= 16 per dimension");
  if (box.n_vars() != sys.n_vars()) throw std::invalid_argument("box dimension != n_vars");
  int r = sys.r();

  // Outer grid: the inner integral moves with phase sensitivity |f| <= mass,
  // so the gamma step keeps mass * step below pi/4. Multiples of 4 keep the
  // T/4 and T/2 traces aligned with cell boundaries.
  double mass = 0;
  for (const Form& f : sys.forms()) mass = std::max(mass, form_coefficient_mass(f));
  int per_dim = std::max(grid, static_cast<int>(std::ceil(2 * t_max * mass * 4 / M_PI)));
  per_dim = ((per_dim + 3) / 4) * 4;

  SingularIntegralTruncation out;
  out.t_max = t_max;
  out.grid = grid;

  double step = 2 * t_max / per_dim;
  Kahan quarter_re, half_re, full_re;
  Kahan full_im;
  std::vector<int> idx(r, 0);
  std::vector<double> gamma(r);
  double vol_cell = std::pow(step, r);
  for (;;) {
    double norm = 0;
    for (int i = 0; i < r; ++i) {
      gamma[i] = -t_max + (idx[i] + 0.5) * step;
      norm = std::max(norm, std::abs(gamma[i]));
    }
    auto inner = oscillatory_box_integral(sys, box, gamma, grid, opt);
    double re = vol_cell * inner.real();
    double im = vol_cell * inner.imag();
    full_re.add(re);
    full_im.add(im);
    if (norm <= t_max / 2) half_re.add(re);
    if (norm <= t_max / 4) quarter_re.add(re);
    int t = 0;
    while (t < r && ++idx[t] == per_dim) idx[t++] = 0;
    if (t == r) break;
  }
  out.value = full_re.s;
  out.max_imag = std::abs(full_im.s);
  out.convergence_trace = {{t_max / 4, quarter_re.s}, {t_max / 2, half_re.s}, {t_max, full_re.s}};
  double denom = std::max(std::abs(full_re.s), 1e-12);
  out.converged = std::abs(full_re.s - half_re.s) <= 0.2 * denom;
  return out;
}

PredictReport predict_and_verify(const FormSystem& sys, const Box& box,
                                 const std::vector<Rat>& P_list, unsigned long q_max,
                                 double t_max, int grid, std::optional<bool> hypothesis_pass,
                                 const CircleOptions& opt) {
  if (P_list.empty()) throw std::invalid_argument("need at least one P");
  PredictReport rep;
  rep.series = singular_series(sys, q_max, opt);
  rep.integral = singular_integral(sys, box, t_max, grid, opt);
  rep.positive_growth = sys.n_vars() > sys.r() * sys.degree();
  rep.hypothesis_pass = hypothesis_pass;

  int exponent = sys.n_vars() - sys.r() * sys.degree();
  for (const Rat& P : P_list) {
    PredictRow row;
    row.P = P;
    row.N = count_solutions(sys, box, P, opt.workers).count;
    row.prediction =
        rep.series.value * rep.integral.value * std::pow(P.get_d(), exponent);
    row.ratio = row.prediction != 0 ? row.N.get_d() / row.prediction
                                    : std::numeric_limits<double>::quiet_NaN();
    rep.rows.push_back(row);
  }

  const auto& first = rep.rows.front();
  const auto& last = rep.rows.back();
  bool near_one = std::isfinite(last.ratio) && std::abs(last.ratio - 1.0) < 0.10;
  bool improving = std::isfinite(first.ratio) &&
                   std::abs(last.ratio - 1.0) <= std::abs(first.ratio - 1.0) + 1e-9;
  rep.consistent = near_one && improving;

  // A vanishing archimedean factor signals no real points off the origin: the
  // truncated integral keeps decaying as T grows instead of stabilizing.
  const auto& trace = rep.integral.convergence_trace;
  rep.real_obstruction =
      trace.size() == 3 &&
      std::abs(trace[1].second) <= 0.8 * std::abs(trace[0].second) &&
      std::abs(trace[2].second) <= 0.8 * std::abs(trace[1].second);
  return rep;
}

}  // namespace formlab
