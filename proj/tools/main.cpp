// formlab: counting functions, exponential sums, the Weyl rational-approximation
// dichotomy, pencil invariants, and truncated circle-method predictions for
// systems of integral homogeneous forms.

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "formlab/guarded.hpp"
#include "formlab/report.hpp"

using namespace formlab;

namespace {

// Mathematical assertion failure in the bundled corpus: exit code 2.
class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalArgs {
  std::string system_file;
  std::string box_spec;
  std::string csv_path;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::uint64_t seed = 12345;
  int precision_bits = 256;
  bool no_timing = false;
};

FormSystem load_system(const GlobalArgs& g) {
  if (g.system_file.empty()) throw CLI::ValidationError("--system is required");
  return load_system_file(g.system_file);
}

Box resolve_box(const GlobalArgs& g, int n) {
  return g.box_spec.empty() ? Box::unit(n) : Box::parse(g.box_spec, n);
}

std::vector<Rat> parse_rational_list(const std::vector<std::string>& parts) {
  std::vector<Rat> out;
  for (const auto& s : parts) out.push_back(parse_rational(s));
  return out;
}

std::vector<Rat> parse_alpha(const std::string& csv) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parse_rational_list(parts);
}

OJson config_echo(const GlobalArgs& g, const FormSystem* sys, const Box* box) {
  OJson cfg{{"workers", g.workers},
            {"seed", g.seed},
            {"precision_bits", g.precision_bits}};
  if (!g.system_file.empty()) cfg["system_file"] = g.system_file;
  if (sys) {
    OJson forms = OJson::array();
    for (const Form& f : sys->forms()) forms.push_back(f.str());
    cfg["system"] = OJson{{"n", sys->n_vars()}, {"d", sys->degree()}, {"r", sys->r()},
                          {"forms", forms}};
  }
  if (box) cfg["box"] = box->str();
  return cfg;
}

int emit(const GlobalArgs& g, OJson report, std::chrono::steady_clock::time_point start) {
  if (!g.no_timing) {
    report["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  }
  std::string why;
  if (!validate_report(report, &why)) {
    throw std::logic_error("internal: report failed schema validation: " + why);
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_count(const GlobalArgs& g, const std::vector<std::string>& p_args) {
  auto start = std::chrono::steady_clock::now();
  FormSystem sys = load_system(g);
  Box box = resolve_box(g, sys.n_vars());
  auto p_list = parse_rational_list(p_args);

  OJson rows = OJson::array();
  std::vector<std::pair<std::string, std::string>> csv_rows;
  for (const Rat& P : p_list) {
    auto res = count_solutions(sys, box, P, g.workers);
    rows.push_back(json_of(res));
    csv_rows.emplace_back(to_string(P), to_string(res.count));
  }
  if (!g.csv_path.empty()) write_series_csv(g.csv_path, "P", "count", csv_rows);

  OJson prov{{"count", "number of integer points x in the dilated box P*B with f_i(x) = 0 "
                       "for every i, by exact enumeration"},
             {"box", "rational sub-box of [-1,1]^n; membership decided by exact comparison"}};
  return emit(g, make_report("count", config_echo(g, &sys, &box), OJson{{"rows", rows}}, prov),
              start);
}

int cmd_expsum(const GlobalArgs& g, const std::string& alpha_csv, const std::string& p_arg,
               const std::string& method) {
  auto start = std::chrono::steady_clock::now();
  FormSystem sys = load_system(g);
  Box box = resolve_box(g, sys.n_vars());
  auto alpha = parse_alpha(alpha_csv);
  Rat P = parse_rational(p_arg);

  WeylOptions opt;
  opt.workers = g.workers;
  opt.precision_bits = g.precision_bits;
  if (method == "exact") opt.phase_point_cap = Int("100000000000");
  if (method == "float") opt.residue_modulus_cap = 0;
  auto res = exponential_sum(sys, alpha, box, P, opt);

  OJson cfg = config_echo(g, &sys, &box);
  OJson alpha_json = OJson::array();
  for (const Rat& a : alpha) alpha_json.push_back(to_string(a));
  cfg["alpha"] = alpha_json;
  cfg["P"] = to_string(P);
  cfg["method"] = method;
  OJson prov{{"S", "sum of e(alpha_1 f_1(x) + ... + alpha_r f_r(x)) over the integer points "
                   "of P*B, with e(t) = exp(2*pi*i*t)"},
             {"exact_phase_path", "rational phases accumulate exact residue-class counts; "
                                  "the complex value is formed once at the end"}};
  return emit(g, make_report("expsum", cfg, json_of(res), prov), start);
}

int cmd_weyl(const GlobalArgs& g, const std::string& alpha_csv, const std::string& theta_arg,
             const std::string& p_arg, const std::string& mode, double k,
             std::size_t column_cap, double gtilde_flag) {
  auto start = std::chrono::steady_clock::now();
  FormSystem sys = load_system(g);
  Box box = resolve_box(g, sys.n_vars());
  auto alpha = parse_alpha(alpha_csv);
  Rat theta = parse_rational(theta_arg);
  Rat P = parse_rational(p_arg);

  WeylOptions opt;
  opt.workers = g.workers;
  opt.precision_bits = g.precision_bits;
  opt.column_cap = column_cap;

  OJson result;
  if (mode == "approx") {
    result = json_of(major_arc_approximation(sys, alpha, theta, P, opt));
  } else {
    std::optional<double> gtilde;
    if (gtilde_flag > 0) {
      gtilde = gtilde_flag;
    } else if (sys.degree() == 2) {
      // exact pencil ranks give the singular-locus lower bound n - u cheaply
      auto u = u_invariant(sys, 2, {5, 7, 11}, FpOptions{.seed = g.seed}, 4);
      gtilde = static_cast<double>(sys.n_vars() - u.u);
    }
    result = json_of(run_dichotomy(sys, alpha, theta, box, P, k, gtilde, opt));
  }

  OJson cfg = config_echo(g, &sys, &box);
  OJson alpha_json = OJson::array();
  for (const Rat& a : alpha) alpha_json.push_back(to_string(a));
  cfg["alpha"] = alpha_json;
  cfg["theta"] = to_string(theta);
  cfg["P"] = to_string(P);
  cfg["mode"] = mode;
  cfg["k"] = k;
  cfg["column_cap"] = column_cap;
  OJson prov{
      {"psi", "matrix with rows i = 1..r and one column per pair (j, tuple), holding "
              "Gamma_i(e_j, x^(2),...,x^(d)) over the near-solution tuples at xi = theta, "
              "eta = d - (d-1)*theta"},
      {"major_arc", "full-rank minor: q = |det|, a from the adjugate applied to the nearest "
                    "integers of sum_i alpha_i psi_il, then gcd-reduced"},
      {"rank_deficient", "integer relation b with b^T psi = 0, certifying a degenerate "
                         "pencil member"}};
  return emit(g, make_report("weyl", cfg, result, prov), start);
}

int cmd_invariants(const GlobalArgs& g, int b_bound, const std::vector<unsigned long>& primes,
                   unsigned long long trials, unsigned long long exact_threshold,
                   int vstar_max_n) {
  auto start = std::chrono::steady_clock::now();
  FormSystem sys = load_system(g);

  InvariantOptions opt;
  opt.b_bound = b_bound;
  if (!primes.empty()) opt.primes = primes;
  opt.fp.trials = trials;
  opt.fp.exact_threshold = exact_threshold;
  opt.fp.seed = g.seed;
  opt.fp.workers = g.workers;
  opt.vstar_max_vars = vstar_max_n;
  auto rep = check_theorem_conditions(sys, opt);

  OJson cfg = config_echo(g, &sys, nullptr);
  cfg["b_bound"] = b_bound;
  OJson pj = OJson::array();
  for (auto p : opt.primes) pj.push_back(p);
  cfg["primes"] = pj;
  cfg["trials"] = trials;
  cfg["exact_threshold"] = exact_threshold;
  OJson prov{
      {"u", "max over searched primitive b of dim Sing(b_1 f_1 + ... + b_r f_r); exact "
            "n - rank for quadratics, finite-field point-count estimate otherwise"},
      {"dim_v_star", "dimension of the locus where the r x n Jacobian has rank < r, from "
                     "finite-field point counts"},
      {"theorem1", "n - u must strictly exceed r(r+1)(d-1)2^(d-1)"},
      {"theorem2", "h-invariant threshold phi(d) r(r+1)(d-1)2^(d-1); at d = 2 the rank of "
                   "every pencil member must strictly exceed 2r(r+1)"},
      {"corollary1", "inf_b g(f_b) > r(r+1)(d-1)2^(d-1) via g(f_b) >= n - dim Sing(f_b)"}};
  return emit(g, make_report("invariants", cfg, json_of(rep), prov), start);
}

int cmd_predict(const GlobalArgs& g, const std::vector<std::string>& p_args,
                unsigned long qmax, double tmax, int grid, bool check_hypothesis) {
  auto start = std::chrono::steady_clock::now();
  FormSystem sys = load_system(g);
  Box box = resolve_box(g, sys.n_vars());
  auto p_list = parse_rational_list(p_args);

  std::optional<bool> hypothesis;
  std::string note;
  if (check_hypothesis) {
    InvariantOptions iopt;
    iopt.b_bound = 3;
    iopt.fp.seed = g.seed;
    auto inv = check_theorem_conditions(sys, iopt);
    if (inv.theorem1.verdict == Verdict::kInconclusive) {
      note = "hypothesis check inconclusive";
    } else {
      hypothesis = inv.theorem1.verdict == Verdict::kPass;
      note = hypothesis.value() ? "strict singularity condition holds on the searched pencil"
                                : "hypothesis not satisfied - no guarantee";
    }
  }

  CircleOptions opt;
  opt.workers = g.workers;
  auto rep = predict_and_verify(sys, box, p_list, qmax, tmax, grid, hypothesis, opt);
  rep.hypothesis_note = note;

  if (!g.csv_path.empty()) {
    std::ofstream out(g.csv_path);
    if (!out) throw std::runtime_error("cannot open csv output: " + g.csv_path);
    out << "P,N,prediction,ratio\n";
    for (const auto& row : rep.rows) {
      out << to_string(row.P) << "," << to_string(row.N) << "," << row.prediction << ","
          << row.ratio << "\n";
    }
  }

  OJson cfg = config_echo(g, &sys, &box);
  cfg["qmax"] = qmax;
  cfg["tmax"] = tmax;
  cfg["grid"] = grid;
  OJson pj = OJson::array();
  for (const Rat& P : p_list) pj.push_back(to_string(P));
  cfg["P"] = pj;
  OJson prov{
      {"singular_series", "sum over q <= Q_max of q^-n sum over residue tuples a with "
                          "gcd(q, a) = 1 of the complete exponential sum S_{a,q}"},
      {"singular_integral", "integral over gamma in [-T,T]^r of the oscillatory box "
                            "integral of e(gamma . f(x))"},
      {"prediction", "series * integral * P^(n - r*d), compared against the exact count"}};
  return emit(g, make_report("predict", cfg, json_of(rep), prov), start);
}

// ---------------------------------------------------------------------------
// Bundled corpus: the bilinear family, diagonal quadratics, the factorization
// example, and the dichotomy fixtures, each asserted against frozen values.

FormSystem q_family(int r, int k) {
  int n = k * (r + 1);
  std::vector<Form> forms;
  for (int i = 1; i <= r; ++i) {
    std::vector<std::pair<Exponents, Int>> terms;
    for (int j = 1; j <= k; ++j) {
      Exponents e(n, 0);
      e[j - 1] = 1;
      e[k + (i - 1) * k + j - 1] = 1;
      terms.emplace_back(std::move(e), Int(1));
    }
    forms.push_back(Form::from_terms(n, terms));
  }
  return FormSystem(std::move(forms));
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw FixtureError("corpus fixture failed: " + what);
  std::cerr << "[ok] " << what << "\n";
}

int cmd_corpus(const GlobalArgs& g) {
  auto start = std::chrono::steady_clock::now();
  OJson fixtures = OJson::array();
  auto record = [&](const std::string& name) { fixtures.push_back(name); };

  InvariantOptions iopt;
  iopt.b_bound = 3;
  iopt.primes = {5, 7, 11};
  iopt.fp.seed = g.seed;

  {
    auto rep = check_theorem_conditions(q_family(1, 2), iopt);
    expect(rep.u.u == 0, "bilinear (r,k)=(1,2): u = 0");
    expect(rep.dim_v_star && rep.dim_v_star->dim_estimate == 0,
           "bilinear (1,2): dim V* = 0 = u + r - 1");
    expect(rep.theorem1.verdict == Verdict::kFail && rep.theorem1.margin == 0,
           "bilinear (1,2): strict inequality just fails (margin 0)");
    record("bilinear_r1_k2");
  }
  {
    auto rep = check_theorem_conditions(q_family(2, 2), iopt);
    expect(rep.u.u == 2, "bilinear (2,2): u = k(r-1) = 2");
    expect(rep.dim_v_star && rep.dim_v_star->dim_estimate == 3 && rep.dim_v_star->consistent,
           "bilinear (2,2): dim V* = k(r-1) + r - 1 = 3 across primes 5, 7, 11");
    expect(rep.u.u <= rep.dim_v_star->dim_estimate, "bilinear (2,2): u <= dim V*");
    expect(rep.theorem1.verdict == Verdict::kFail, "bilinear (2,2): 4 <= 12 fails");
    record("bilinear_r2_k2");
  }
  {
    auto rep = check_theorem_conditions(q_family(2, 7), iopt);
    expect(rep.u.u == 7, "bilinear (2,7): u = 7");
    expect(rep.theorem1.verdict == Verdict::kPass && rep.theorem1.margin == 2,
           "bilinear (2,7): n - u = 14 > 12 with margin 2");
    expect(rep.theorem2.verdict == Verdict::kPass && rep.theorem2.margin == 2,
           "bilinear (2,7): min pencil rank 14 > 2r(r+1) = 12");
    record("bilinear_r2_k7");
  }
  {
    FormSystem diag({Form::parse("x1^2", 2), Form::parse("x2^2", 2)});
    auto u = u_invariant(diag, 2, iopt.primes, iopt.fp, 4);
    expect(u.u == 1, "diagonal pair: u = 1 at b = (1,0)");
    FormSystem circle_form({Form::parse("x1^2 + x2^2", 2)});
    expect(count_solutions(circle_form, Box::unit(2), Rat(10)).count == 1,
           "x1^2 + x2^2: only the origin up to P = 10");
    record("diagonal_quadratics");
  }
  {
    Form split = Form::parse("x1^2 - x2^2", 2);
    expect(quadratic_rank(split) == 2, "x1^2 - x2^2: rank 2");
    expect(h_invariant_bounds(split) == std::pair<int, int>{1, 2},
           "x1^2 - x2^2: h within [1, 2] (the product of two linear forms attains 1)");
    expect(singular_locus_dimension(split, iopt.primes).dim_estimate == 0,
           "x1^2 - x2^2: isolated singular point");
    FormSystem sys({split});
    expect(count_solutions(sys, Box::unit(2), Rat(2)).count == 9,
           "x1^2 - x2^2: 9 points with |x1| = |x2| <= 2");
    record("factorization_example");
  }
  std::vector<OJson> audits;
  {
    FormSystem sq({Form::parse("x1^2", 1)});
    auto outcome = major_arc_approximation(sq, {Rat(1, 3)}, Rat(1), Rat(10));
    const auto* major = std::get_if<MajorArc>(&outcome);
    expect(major && major->q == 3 && major->a[0] == 1 && major->errors[0] == 0,
           "weyl on x1^2 at alpha 1/3, P 10: (q, a) = (3, 1), exact");
    audits.push_back(json_of(outcome));
    record("weyl_quarter_phase");
  }
  {
    FormSystem dep({Form::parse("x1^2 + x1*x2", 2), Form::parse("2*x1^2 + 2*x1*x2", 2)});
    auto outcome = major_arc_approximation(dep, {Rat(1, 2), Rat(1, 3)}, Rat(1), Rat(12));
    const auto* rd = std::get_if<RankDeficient>(&outcome);
    expect(rd && rd->b == std::vector<Int>{Int(2), Int(-1)},
           "dependent pencil f, 2f: certificate b = (2, -1)");
    expect(rd && rd->witness_pencil.is_zero(), "dependent pencil: witness is the zero form");
    record("dependent_pencil");
  }
  {
    FormSystem sq({Form::parse("x1^2", 1)});
    auto s2 = complete_exponential_sum_mod_q(sq, {Int(1)}, 2);
    expect(std::abs(s2) < 1e-12, "S_{1,2} on x1^2 vanishes");
    auto s4 = complete_exponential_sum_mod_q(sq, {Int(1)}, 4);
    expect(std::abs(s4 - std::complex<double>{2, 2}) < 1e-12, "S_{1,4} on x1^2 is 2 + 2i");
    auto series = singular_series(sq, 1);
    expect(series.value == 1.0, "singular series truncated at q = 1 is exactly 1");
    auto parity = exponential_sum(sq, {Rat(1, 2)}, Box::unit(1), Rat(10));
    expect(std::abs(parity.value - std::complex<double>{1, 0}) < 1e-12,
           "S(1/2) telescopes to 1 for even P");
    record("complete_sums");
  }
  {
    // size claims of the rational approximation across the collected runs
    double slack = 1.0;
    for (const auto& a : audits) {
      if (a["type"] != "major_arc") continue;
      double log_p_q = a["log_p_q"].get<double>();
      expect(log_p_q <= 1.0 * 1.0 + slack, "exponent audit: log_P q within r(d-1)theta + 1");
      if (a.contains("max_log_p_error")) {
        expect(a["max_log_p_error"].get<double>() <= -2.0 + 1.0 + slack,
               "exponent audit: log_P |q alpha - a| within -d + r(d-1)theta + 1");
      }
    }
    record("exponent_audit");
  }

  OJson cfg = config_echo(g, nullptr, nullptr);
  OJson result{{"fixtures", fixtures}, {"all_passed", true}};
  OJson prov{{"corpus", "bundled systems: the bilinear family Q_i(x, y) = sum_j x_j y_ji for "
                        "(r,k) in {(1,2),(2,2),(2,7)}, diagonal quadratics, and the split "
                        "form x1^2 - x2^2, each asserted against frozen values"}};
  return emit(g, make_report("corpus", cfg, result, prov), start);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counting functions, exponential sums, and the Weyl dichotomy for systems "
               "of integral homogeneous forms"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--system", g.system_file, "system file: header 'n=.. d=.. r=..', one form per line");
  app.add_option("--box", g.box_spec, "rational box 'lo:hi,lo:hi,...' inside [-1,1]^n (default unit box)");
  app.add_option("--workers", g.workers, "worker threads");
  app.add_option("--seed", g.seed, "seed for every sampled computation");
  app.add_option("--precision-bits", g.precision_bits, "bit budget for guarded comparisons");
  app.add_option("--csv", g.csv_path, "write the series table as CSV");
  app.add_flag("--no-timing", g.no_timing, "omit timing_ms from the report");

  auto* count = app.add_subcommand("count", "exact N(P) over the dilated box");
  std::vector<std::string> count_p;
  count->add_option("--P", count_p, "dilation parameter (repeatable, rational)")->required();

  auto* expsum = app.add_subcommand("expsum", "exponential sum S(alpha)");
  std::string es_alpha, es_p, es_method = "auto";
  expsum->add_option("--alpha", es_alpha, "comma-separated rational phases")->required();
  expsum->add_option("--P", es_p, "dilation parameter")->required();
  expsum->add_option("--method", es_method, "auto|exact|float")
      ->check(CLI::IsMember({"auto", "exact", "float"}));

  auto* weyl = app.add_subcommand("weyl", "rational approximation / kernel certificate");
  std::string w_alpha, w_theta = "1", w_p, w_mode = "approx";
  double w_k = 1.0, w_gtilde = 0.0;
  std::size_t w_cap = 10'000'000;
  weyl->add_option("--alpha", w_alpha, "comma-separated rational phases")->required();
  weyl->add_option("--theta", w_theta, "tuple-box exponent in (0,1], rational");
  weyl->add_option("--P", w_p, "dilation parameter")->required();
  weyl->add_option("--mode", w_mode, "approx|full")->check(CLI::IsMember({"approx", "full"}));
  weyl->add_option("--k", w_k, "exponent k for the |S| alternative (full mode)");
  weyl->add_option("--column-cap", w_cap, "psi column cap");
  weyl->add_option("--gtilde", w_gtilde, "override for inf_b g(f_b) in the reported exponent");

  auto* inv = app.add_subcommand("invariants", "pencil invariants and the strict conditions");
  int i_bound = 5, i_vstar = 8;
  std::vector<unsigned long> i_primes;
  unsigned long long i_trials = 2'000'000, i_exact = 10'000'000;
  inv->add_option("--b-bound", i_bound, "sup-norm of the pencil search box");
  inv->add_option("--primes", i_primes, "primes for finite-field estimation");
  inv->add_option("--trials", i_trials, "samples per prime beyond the exact threshold");
  inv->add_option("--exact-threshold", i_exact, "enumerate exactly while p^n is below this");
  inv->add_option("--vstar-max-n", i_vstar, "skip the V* estimate beyond this many variables");

  auto* predict = app.add_subcommand("predict", "truncated prediction against exact counts");
  std::vector<std::string> pr_p;
  unsigned long pr_qmax = 50;
  double pr_tmax = 8.0;
  int pr_grid = 16;
  bool pr_hyp = false;
  predict->add_option("--P", pr_p, "dilation parameters (repeatable)")->required();
  predict->add_option("--qmax", pr_qmax, "series truncation");
  predict->add_option("--tmax", pr_tmax, "integral truncation");
  predict->add_option("--grid", pr_grid, "quadrature grid floor per dimension (>= 16)");
  predict->add_flag("--check-hypothesis", pr_hyp, "also run the strict condition checker");

  auto* corpus = app.add_subcommand("corpus", "run the bundled fixture corpus");

  for (auto* sub : {count, expsum, weyl, inv, predict, corpus}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (count->parsed()) return cmd_count(g, count_p);
    if (expsum->parsed()) return cmd_expsum(g, es_alpha, es_p, es_method);
    if (weyl->parsed()) return cmd_weyl(g, w_alpha, w_theta, w_p, w_mode, w_k, w_cap, w_gtilde);
    if (inv->parsed()) return cmd_invariants(g, i_bound, i_primes, i_trials, i_exact, i_vstar);
    if (predict->parsed()) return cmd_predict(g, pr_p, pr_qmax, pr_tmax, pr_grid, pr_hyp);
    if (corpus->parsed()) return cmd_corpus(g);
  } catch (const FixtureError& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionError& e) {
    std::cerr << "precision failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
