#include "formlab/count.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "formlab/guarded.hpp"
#include "near_scan.hpp"

namespace formlab {

CountResult count_solutions(const FormSystem& sys, const Box& box, const Rat& P, int workers) {
  if (box.n_vars() != sys.n_vars()) throw std::invalid_argument("box dimension != n_vars");
  if (P < 1) throw std::invalid_argument("P must be >= 1");
  auto start = std::chrono::steady_clock::now();
  auto ranges = dilated_box_ranges(box, P);
  CountResult res;
  res.P = P;
  res.points_enumerated = box_point_total(ranges);
  res.count = count_common_zeros(sys.forms(), ranges, workers);
  res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

Int count_multilinear_zero(const Form& f, std::int64_t P, int workers) {
  if (f.degree() < 2) throw std::invalid_argument("multilinear counting needs degree >= 2");
  if (P < 0) throw std::invalid_argument("P must be nonnegative");
  int n = f.n_vars();
  int m = n * (f.degree() - 1);
  std::vector<Form> eqs;
  eqs.reserve(n);
  for (int j = 1; j <= n; ++j) eqs.push_back(multilinear_equation(f, j));
  std::vector<IntRange> ranges(m, IntRange{-P, P});
  return count_common_zeros(eqs, ranges, workers);
}

unsigned long long count_weyl_near_solutions(const FormSystem& sys,
                                             const std::vector<Rat>& alpha, const Rat& xi,
                                             const Rat& eta, const Rat& P,
                                             int precision_bits) {
  if (xi <= 0 || xi > 1) throw std::invalid_argument("xi must lie in (0, 1]");
  if (P < 1) throw std::invalid_argument("P must be >= 1");
  Int bound = guarded_floor_pow(P, xi, precision_bits);
  PowThreshold threshold(P, Rat(-eta), precision_bits);
  detail::NearScan scan(sys, alpha, bound, threshold);
  return scan.count();
}

GEstimate estimate_g_invariant(const Form& f, const std::vector<std::int64_t>& P_list,
                               int workers) {
  if (P_list.size() < 3) throw std::invalid_argument("need at least 3 sample values of P");
  for (std::size_t i = 0; i < P_list.size(); ++i) {
    if (P_list[i] < 2) throw std::invalid_argument("sample P must be >= 2");
    if (i && P_list[i] <= P_list[i - 1]) {
      throw std::invalid_argument("sample P values must be strictly increasing");
    }
  }
  GEstimate est;
  std::vector<double> xs, ys;
  for (std::int64_t P : P_list) {
    Int m = count_multilinear_zero(f, P, workers);
    est.samples.emplace_back(P, m);
    xs.push_back(std::log(static_cast<double>(P)));
    ys.push_back(std::log(m.get_d()));  // M_f(P) >= 1, the zero tuple always qualifies
  }
  double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.slope = sxy / sxx;
  est.g_estimate = (f.degree() - 1) * f.n_vars() - est.slope;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double fit = my + est.slope * (xs[i] - mx);
    ss += (ys[i] - fit) * (ys[i] - fit);
  }
  est.residual = std::sqrt(ss / n);
  return est;
}

void write_series_csv(const std::string& path, const std::string& col_a,
                      const std::string& col_b,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open csv output: " + path);
  out << col_a << "," << col_b << "\n";
  for (const auto& [a, b] : rows) out << a << "," << b << "\n";
}

}  // namespace formlab
