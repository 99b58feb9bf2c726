#include "formlab/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "formlab/count.hpp"
#include "formlab/enumerate.hpp"
#include "formlab/guarded.hpp"
#include "near_scan.hpp"

namespace formlab {

namespace {

// Streaming column elimination over Q. Keeps a fraction-free echelon basis of
// the column space and remembers the first r independent original columns.
class ColumnEliminator {
 public:
  explicit ColumnEliminator(int r) : r_(r) {}

  bool offer(const std::vector<Int>& col) {
    std::vector<Int> v = col;
    for (std::size_t row = 0; row < echelon_.size(); ++row) {
      int p = pivots_[row];
      if (v[p] == 0) continue;
      Int piv = echelon_[row][p];
      Int fac = v[p];
      for (int i = 0; i < r_; ++i) v[i] = piv * v[i] - fac * echelon_[row][i];
      Int g = content(v);
      if (g > 1) {
        for (Int& x : v) x /= g;
      }
    }
    int pivot = -1;
    for (int i = 0; i < r_; ++i) {
      if (v[i] != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot == -1) return false;
    // keep rows sorted by pivot so reduction stays triangular
    std::size_t at = 0;
    while (at < pivots_.size() && pivots_[at] < pivot) ++at;
    pivots_.insert(pivots_.begin() + at, pivot);
    echelon_.insert(echelon_.begin() + at, std::move(v));
    return true;
  }

  int rank() const { return static_cast<int>(echelon_.size()); }

 private:
  int r_;
  std::vector<std::vector<Int>> echelon_;
  std::vector<int> pivots_;
};

Rat theta_to_eta(const FormSystem& sys, const Rat& theta) {
  return Rat(sys.degree()) - Rat(sys.degree() - 1) * theta;
}

void check_theta(const Rat& theta) {
  if (theta <= 0 || theta > 1) throw std::invalid_argument("theta must lie in (0, 1]");
}


}  // namespace

ExpSumResult exponential_sum(const FormSystem& sys, const std::vector<Rat>& alpha,
                             const Box& box, const Rat& P, const WeylOptions& opt) {
  if (static_cast<int>(alpha.size()) != sys.r()) throw std::invalid_argument("alpha length != r");
  if (box.n_vars() != sys.n_vars()) throw std::invalid_argument("box dimension != n_vars");
  auto ranges = dilated_box_ranges(box, P);
  ExpSumResult res;
  res.points = box_point_total(ranges);

  Int q_common = 1;
  for (const Rat& a : alpha) {
    Int den = a.get_den();
    mpz_lcm(q_common.get_mpz_t(), q_common.get_mpz_t(), den.get_mpz_t());
  }
  bool all_zero = std::all_of(alpha.begin(), alpha.end(), [](const Rat& a) { return a == 0; });
  if (all_zero) {
    res.value = {res.points.get_d(), 0.0};
    res.exact_phase_path = true;
    return res;
  }

  if (q_common <= static_cast<long>(opt.residue_modulus_cap) &&
      res.points <= opt.phase_point_cap) {
    unsigned long q = q_common.get_ui();
    std::vector<Int> weights;
    for (const Rat& a : alpha) weights.push_back(Rat(a * Rat(q_common)).get_num());
    auto spectrum = residue_spectrum(sys.forms(), weights, q, ranges, opt.workers,
                                     opt.phase_point_cap);
    double re = 0, im = 0, cre = 0, cim = 0;
    for (unsigned long m = 0; m < q; ++m) {
      if (spectrum[m] == 0) continue;
      double c = static_cast<double>(spectrum[m]);
      double ang = 2 * M_PI * static_cast<double>(m) / static_cast<double>(q);
      double x = c * std::cos(ang), y = c * std::sin(ang);
      double tx = x - cre, sx = re + tx;
      cre = (sx - re) - tx;
      re = sx;
      double ty = y - cim, sy = im + ty;
      cim = (sy - im) - ty;
      im = sy;
    }
    res.value = {re, im};
    res.exact_phase_path = true;
    return res;
  }

  std::vector<double> theta;
  for (const Rat& a : alpha) theta.push_back(a.get_d());
  auto [re, im] = phase_sum_float(sys.forms(), theta, ranges, opt.workers, opt.phase_point_cap);
  res.value = {re, im};
  res.exact_phase_path = false;
  return res;
}

PsiMatrix build_psi(const FormSystem& sys, const std::vector<Rat>& alpha, const Rat& theta,
                    const Rat& P, const WeylOptions& opt) {
  check_theta(theta);
  Int bound = guarded_floor_pow(P, theta, opt.precision_bits);
  PowThreshold threshold(P, -theta_to_eta(sys, theta), opt.precision_bits);
  detail::NearScan scan(sys, alpha, bound, threshold);

  PsiMatrix psi;
  psi.r = sys.r();
  int n = sys.n_vars();
  bool capped = false;
  psi.near_tuples = scan.scan([&](const std::vector<std::int64_t>& tuple, const IMat& gamma) {
    for (int j = 0; j < n; ++j) {
      if (psi.columns.size() >= opt.column_cap) {
        capped = true;
        return false;
      }
      std::vector<Int> col(psi.r);
      for (int i = 0; i < psi.r; ++i) col[i] = gamma[i][j];
      psi.columns.push_back(std::move(col));
      psi.labels.push_back({j + 1, tuple});
    }
    return true;
  });
  if (capped) {
    throw EnumerationCapError(
        "psi column cap exceeded (strong evidence for the counting alternative); "
        "shrink theta or P, or raise the cap");
  }
  return psi;
}

DichotomyOutcome major_arc_approximation(const FormSystem& sys, const std::vector<Rat>& alpha,
                                         const Rat& theta, const Rat& P,
                                         const WeylOptions& opt) {
  check_theta(theta);
  if (static_cast<int>(alpha.size()) != sys.r()) throw std::invalid_argument("alpha length != r");
  int r = sys.r();
  int n = sys.n_vars();
  Int bound = guarded_floor_pow(P, theta, opt.precision_bits);
  PowThreshold threshold(P, -theta_to_eta(sys, theta), opt.precision_bits);
  detail::NearScan scan(sys, alpha, bound, threshold);

  ColumnEliminator elim(r);
  std::vector<std::vector<Int>> selected;  // first r independent columns
  std::vector<PsiColumnLabel> selected_labels;
  unsigned long long columns_seen = 0;
  bool capped = false;

  unsigned long long near = scan.scan([&](const std::vector<std::int64_t>& tuple,
                                          const IMat& gamma) {
    for (int j = 0; j < n; ++j) {
      if (columns_seen >= opt.column_cap) {
        capped = true;
        return false;
      }
      ++columns_seen;
      std::vector<Int> col(r);
      for (int i = 0; i < r; ++i) col[i] = gamma[i][j];
      if (elim.offer(col)) {
        selected.push_back(col);
        selected_labels.push_back({j + 1, tuple});
        if (elim.rank() == r) return false;  // minor complete; stop the scan
      }
    }
    return true;
  });

  if (elim.rank() == r) {
    // Case (a): q from the determinant of the selected minor, a from its
    // adjugate applied to the nearest integers of sum_i alpha_i * minor_il.
    IMat minor(r, std::vector<Int>(r));
    for (int l = 0; l < r; ++l) {
      for (int i = 0; i < r; ++i) minor[i][l] = selected[l][i];
    }
    Int det = determinant(minor);
    IMat coeff = adjugate(transpose(minor));  // coeff * minor^T = det * Id
    std::vector<Int> a_tilde(r);
    for (int l = 0; l < r; ++l) {
      Rat s = 0;
      for (int i = 0; i < r; ++i) s += alpha[i] * Rat(minor[i][l]);
      a_tilde[l] = round_half_away(s);
    }
    std::vector<Int> a(r, Int(0));
    for (int i = 0; i < r; ++i) {
      for (int l = 0; l < r; ++l) a[i] += coeff[i][l] * a_tilde[l];
    }
    Int q = det;
    if (q < 0) {
      q = -q;
      for (Int& v : a) v = -v;
    }
    Int g = q;
    for (const Int& v : a) {
      Int av = abs(v);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), av.get_mpz_t());
    }
    q /= g;
    for (Int& v : a) v /= g;

    MajorArc out;
    out.q = q;
    out.a = a;
    double logP = std::log(P.get_d());
    out.log_p_q = std::log(q.get_d()) / logP;
    double max_err = 0.0;
    bool any_nonzero = false;
    for (int i = 0; i < r; ++i) {
      Rat err = abs(Rat(q) * alpha[i] - Rat(a[i]));
      out.errors.push_back(err);
      if (err != 0) {
        any_nonzero = true;
        max_err = std::max(max_err, err.get_d());
      }
    }
    if (any_nonzero) out.max_log_p_error = std::log(max_err) / logP;
    out.minor = minor;
    out.minor_labels = selected_labels;
    return out;
  }

  if (capped) {
    throw EnumerationCapError(
        "psi column cap exceeded before the rank decision; shrink theta or P, or raise the cap");
  }

  // Case (b): the rows are dependent; read an integer relation off the
  // independent-column basis. With no nonzero column at all, any unit vector
  // annihilates psi and the first one is chosen.
  RankDeficient out;
  IMat basis(r, std::vector<Int>(selected.size(), Int(0)));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    for (int i = 0; i < r; ++i) basis[i][c] = selected[c][i];
  }
  auto cert = exact_rank_with_certificate(basis);
  if (!cert.left_kernel) throw std::logic_error("rank defect without certificate");
  out.b = *cert.left_kernel;
  out.witness_pencil = pencil_form(sys, out.b);
  out.near_tuples = near;
  out.columns_seen = columns_seen;
  return out;
}

DichotomyReport run_dichotomy(const FormSystem& sys, const std::vector<Rat>& alpha,
                              const Rat& theta, const Box& box, const Rat& P, double k,
                              std::optional<double> g_tilde, const WeylOptions& opt) {
  check_theta(theta);
  if (k <= 0) throw std::invalid_argument("k must be positive");
  int n = sys.n_vars();
  int d = sys.degree();

  DichotomyReport rep;
  auto sum = exponential_sum(sys, alpha, box, P, opt);
  rep.abs_s = std::abs(sum.value);
  rep.exact_phase_path = sum.exact_phase_path;
  rep.trivial_bound = sum.points.get_d();
  double Pd = P.get_d();
  rep.bound_alternative_i = std::pow(Pd, n - k);
  rep.alternative_i_holds = rep.abs_s < rep.bound_alternative_i;

  Rat eta = theta_to_eta(sys, theta);
  rep.near_count = count_weyl_near_solutions(sys, alpha, theta, eta, P, opt.precision_bits);
  double exponent_ii = (d - 1) * n * theta.get_d() - std::pow(2.0, d - 1) * k;
  rep.bound_alternative_ii = std::pow(Pd, exponent_ii);
  rep.alternative_ii_holds = static_cast<double>(rep.near_count) >= rep.bound_alternative_ii;

  rep.g_tilde = g_tilde;
  if (g_tilde) {
    rep.minor_arc_exponent = n - std::pow(2.0, 1 - d) * (*g_tilde) * theta.get_d();
  }

  auto outcome = major_arc_approximation(sys, alpha, theta, P, opt);
  if (std::holds_alternative<RankDeficient>(outcome) && rep.near_count <= 1) {
    // Only the zero tuple qualified: there is no structural pencil relation to
    // certify, just smallness evidence for |S|.
    MinorArcEvidence ev;
    ev.abs_s = rep.abs_s;
    ev.trivial_bound = rep.trivial_bound;
    ev.exponent_bound = rep.minor_arc_exponent;
    rep.outcome = ev;
  } else {
    rep.outcome = std::move(outcome);
  }
  return rep;
}

}  // namespace formlab
