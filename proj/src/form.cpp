#include "formlab/form.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

namespace formlab {

bool GrlexDesc::operator()(const Exponents& a, const Exponents& b) const {
  int da = std::accumulate(a.begin(), a.end(), 0);
  int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

Form Form::from_terms(int n_vars, const std::vector<std::pair<Exponents, Int>>& terms) {
  if (n_vars < 1) throw std::invalid_argument("n_vars must be >= 1");
  if (terms.empty()) throw std::invalid_argument("a form needs at least one term");
  int degree = -1;
  TermMap map;
  for (const auto& [exp, coeff] : terms) {
    if (static_cast<int>(exp.size()) != n_vars) {
      throw std::invalid_argument("exponent vector length does not match n_vars");
    }
    int total = 0;
    for (int e : exp) {
      if (e < 0) throw std::invalid_argument("negative exponent");
      total += e;
    }
    if (degree == -1) degree = total;
    if (total != degree) throw std::invalid_argument("inhomogeneous term set");
    auto [it, inserted] = map.emplace(exp, coeff);
    if (!inserted) it->second += coeff;
  }
  if (degree < 1) throw std::invalid_argument("degree must be >= 1");
  for (auto it = map.begin(); it != map.end();) {
    it = (it->second == 0) ? map.erase(it) : std::next(it);
  }
  if (map.empty()) throw std::invalid_argument("form collapses to zero");
  Form f;
  f.n_ = n_vars;
  f.degree_ = degree;
  f.terms_ = std::move(map);
  return f;
}

Form Form::zero(int n_vars, int degree) {
  Form f;
  f.n_ = n_vars;
  f.degree_ = degree;
  return f;
}

namespace {

struct FormLexer {
  std::string_view s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  long integer() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i) throw std::invalid_argument("expected integer in form text");
    return std::stol(std::string(s.substr(start, i - start)));
  }
};

}  // namespace

Form Form::parse(std::string_view text, int n_vars) {
  if (n_vars < 1) throw std::invalid_argument("n_vars must be >= 1");
  FormLexer lx{text};
  std::vector<std::pair<Exponents, Int>> terms;

  bool first = true;
  while (!lx.eof()) {
    int sign = 1;
    if (lx.consume('+')) {
      if (first) throw std::invalid_argument("leading '+' not allowed");
    } else if (lx.consume('-')) {
      sign = -1;
    } else if (!first) {
      throw std::invalid_argument("expected '+' or '-' between terms");
    }
    first = false;

    Int coeff = sign;
    if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
      coeff = Int(sign) * Int(lx.integer());
      if (!lx.consume('*')) throw std::invalid_argument("coefficient must be followed by '*'");
    }

    Exponents exp(n_vars, 0);
    bool any_factor = false;
    for (;;) {
      if (lx.peek() != 'x') {
        if (!any_factor) throw std::invalid_argument("expected variable factor x<i>");
        break;
      }
      lx.consume('x');
      long idx = lx.integer();
      if (idx < 1 || idx > n_vars) {
        throw std::invalid_argument("variable index out of range: x" + std::to_string(idx));
      }
      long e = 1;
      if (lx.consume('^')) e = lx.integer();
      if (e < 0) throw std::invalid_argument("negative exponent");
      exp[idx - 1] += static_cast<int>(e);
      any_factor = true;
      if (!lx.consume('*')) break;
    }
    terms.emplace_back(std::move(exp), std::move(coeff));
  }
  if (terms.empty()) throw std::invalid_argument("empty form text");
  return from_terms(n_vars, terms);
}

Int Form::evaluate(const std::vector<Int>& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("dimension mismatch");
  Int acc = 0, mono;
  for (const auto& [exp, coeff] : terms_) {
    mono = coeff;
    for (int j = 0; j < n_; ++j) {
      for (int e = 0; e < exp[j]; ++e) mono *= x[j];
    }
    acc += mono;
  }
  return acc;
}

std::vector<Int> Form::gradient_at(const std::vector<Int>& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("dimension mismatch");
  std::vector<Int> grad(n_, Int(0));
  Int mono;
  for (const auto& [exp, coeff] : terms_) {
    for (int j = 0; j < n_; ++j) {
      if (exp[j] == 0) continue;
      mono = coeff * exp[j];
      for (int k = 0; k < n_; ++k) {
        int e = exp[k] - (k == j ? 1 : 0);
        for (int t = 0; t < e; ++t) mono *= x[k];
      }
      grad[j] += mono;
    }
  }
  return grad;
}

Form Form::partial(int var) const {
  if (var < 1 || var > n_) throw std::invalid_argument("variable index out of range");
  Form g;
  g.n_ = n_;
  g.degree_ = degree_ - 1;
  for (const auto& [exp, coeff] : terms_) {
    if (exp[var - 1] == 0) continue;
    Exponents e = exp;
    Int c = coeff * e[var - 1];
    e[var - 1] -= 1;
    auto [it, inserted] = g.terms_.emplace(std::move(e), std::move(c));
    if (!inserted) it->second += c;
  }
  for (auto it = g.terms_.begin(); it != g.terms_.end();) {
    it = (it->second == 0) ? g.terms_.erase(it) : std::next(it);
  }
  return g;
}

std::string Form::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [exp, coeff] : terms_) {
    Int c = coeff;
    if (first) {
      if (c < 0) {
        out << "-";
        c = -c;
      }
    } else {
      out << (c < 0 ? " - " : " + ");
      c = abs(c);
    }
    bool printed = false;
    if (c != 1) {
      out << c.get_str();
      printed = true;
    }
    for (int j = 0; j < n_; ++j) {
      if (exp[j] == 0) continue;
      if (printed) out << "*";
      out << "x" << (j + 1);
      if (exp[j] > 1) out << "^" << exp[j];
      printed = true;
    }
    if (!printed) out << "1";  // unreachable for degree >= 1
    first = false;
  }
  return out.str();
}

FormSystem::FormSystem(std::vector<Form> forms) : forms_(std::move(forms)) {
  if (forms_.empty()) throw std::invalid_argument("a system needs at least one form");
  for (const Form& f : forms_) {
    if (f.is_zero()) throw std::invalid_argument("system members must be nonzero");
    if (f.n_vars() != forms_.front().n_vars() || f.degree() != forms_.front().degree()) {
      throw std::invalid_argument("system members must share n_vars and degree");
    }
  }
}

Form pencil_form(const FormSystem& sys, const std::vector<Int>& b) {
  if (static_cast<int>(b.size()) != sys.r()) throw std::invalid_argument("pencil vector length != r");
  if (std::all_of(b.begin(), b.end(), [](const Int& v) { return v == 0; })) {
    throw std::invalid_argument("all-zero pencil vector");
  }
  Form::TermMap acc;
  for (int i = 0; i < sys.r(); ++i) {
    if (b[i] == 0) continue;
    for (const auto& [exp, coeff] : sys.forms()[i].terms()) {
      Int c = b[i] * coeff;
      auto [it, inserted] = acc.emplace(exp, c);
      if (!inserted) it->second += c;
    }
  }
  std::vector<std::pair<Exponents, Int>> terms;
  for (auto& [exp, coeff] : acc) {
    if (coeff != 0) terms.emplace_back(exp, coeff);
  }
  if (terms.empty()) return Form::zero(sys.n_vars(), sys.degree());
  return Form::from_terms(sys.n_vars(), terms);
}

Int polarize(const Form& f, const std::vector<std::vector<Int>>& xs) {
  int d = f.degree();
  if (d < 1) throw std::invalid_argument("polarize needs degree >= 1");
  if (static_cast<int>(xs.size()) != d) {
    throw std::invalid_argument("polarize needs exactly degree-many vectors");
  }
  int n = f.n_vars();
  for (const auto& x : xs) {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("dimension mismatch");
  }
  Int acc = 0;
  std::vector<Int> sum(n);
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    std::fill(sum.begin(), sum.end(), Int(0));
    int popcount = 0;
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        ++popcount;
        for (int j = 0; j < n; ++j) sum[j] += xs[i][j];
      }
    }
    Int v = f.evaluate(sum);
    acc += ((d - popcount) % 2 == 0) ? v : Int(-v);
  }
  return acc;
}

Int multilinear_basis_row(const FormSystem& sys, int i, int j,
                          const std::vector<std::vector<Int>>& xs) {
  if (i < 1 || i > sys.r()) throw std::invalid_argument("form index out of range");
  if (j < 1 || j > sys.n_vars()) throw std::invalid_argument("variable index out of range");
  if (static_cast<int>(xs.size()) != sys.degree() - 1) {
    throw std::invalid_argument("expected degree-1 vectors");
  }
  std::vector<std::vector<Int>> args;
  args.reserve(xs.size() + 1);
  std::vector<Int> ej(sys.n_vars(), Int(0));
  ej[j - 1] = 1;
  args.push_back(std::move(ej));
  for (const auto& x : xs) args.push_back(x);
  return polarize(sys.form(i), args);
}

Form multilinear_equation(const Form& f, int j) {
  int d = f.degree();
  int n = f.n_vars();
  if (d < 2) throw std::invalid_argument("multilinear equations need degree >= 2");
  if (j < 1 || j > n) throw std::invalid_argument("variable index out of range");
  // Gamma_f(e_j, y_1, ..., y_{d-1}) = Gamma_g(y_1, ..., y_{d-1}) for g = df/dx_j.
  // For a monomial c * x^beta of g, the multilinear expansion is
  //   c * prod(beta_v!) * sum over distinct arrangements (v_1..v_{d-1}) of beta
  //     of prod_t y_t[v_t].
  Form g = f.partial(j);
  int m = d - 1;
  std::vector<std::pair<Exponents, Int>> terms;
  for (const auto& [beta, coeff] : g.terms()) {
    std::vector<int> slots;  // the multiset of variable indices in beta
    Int fact = 1;
    for (int v = 0; v < n; ++v) {
      for (int t = 0; t < beta[v]; ++t) slots.push_back(v);
      for (int t = 2; t <= beta[v]; ++t) fact *= t;
    }
    std::sort(slots.begin(), slots.end());
    do {
      Exponents exp(n * m, 0);
      for (int t = 0; t < m; ++t) exp[t * n + slots[t]] += 1;
      terms.emplace_back(std::move(exp), coeff * fact);
    } while (std::next_permutation(slots.begin(), slots.end()));
  }
  if (terms.empty()) return Form::zero(n * m, m);
  return Form::from_terms(n * m, terms);
}

std::vector<std::vector<Int>> hessian_matrix(const Form& f) {
  if (f.degree() != 2) throw std::invalid_argument("hessian requires a quadratic form");
  int n = f.n_vars();
  std::vector<std::vector<Int>> h(n, std::vector<Int>(n, Int(0)));
  for (const auto& [exp, coeff] : f.terms()) {
    int a = -1, b = -1;
    for (int j = 0; j < n; ++j) {
      if (exp[j] == 2) a = b = j;
      if (exp[j] == 1) (a == -1 ? a : b) = j;
    }
    if (a == b) {
      h[a][a] += 2 * coeff;
    } else {
      h[a][b] += coeff;
      h[b][a] += coeff;
    }
  }
  return h;
}

Box Box::unit(int n_vars) {
  std::vector<std::pair<Rat, Rat>> iv(n_vars, {Rat(-1), Rat(1)});
  return Box(std::move(iv));
}

Box::Box(std::vector<std::pair<Rat, Rat>> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw std::invalid_argument("box needs at least one interval");
  for (const auto& [lo, hi] : intervals_) {
    if (lo < -1 || hi > 1 || lo > hi) {
      throw std::invalid_argument("box intervals must satisfy -1 <= lo <= hi <= 1");
    }
  }
}

Box Box::parse(std::string_view text, int n_vars) {
  std::vector<std::pair<Rat, Rat>> iv;
  std::string s(text);
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("box interval needs lo:hi");
    iv.emplace_back(parse_rational(part.substr(0, colon)), parse_rational(part.substr(colon + 1)));
  }
  if (iv.size() == 1 && n_vars > 1) iv.assign(n_vars, iv.front());
  if (static_cast<int>(iv.size()) != n_vars) {
    throw std::invalid_argument("box dimension does not match n_vars");
  }
  return Box(std::move(iv));
}

std::string Box::str() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i) out << ",";
    out << to_string(intervals_[i].first) << ":" << to_string(intervals_[i].second);
  }
  return out.str();
}

FormSystem parse_system(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0, d = 0, r = 0;
  bool header = false;
  std::vector<Form> forms;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string trimmed;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed.push_back(c);
    }
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
      trimmed.pop_back();
    }
    if (trimmed.empty()) continue;
    if (!header) {
      if (std::sscanf(trimmed.c_str(), "n=%d d=%d r=%d", &n, &d, &r) != 3) {
        throw std::invalid_argument("expected header line 'n=<int> d=<int> r=<int>'");
      }
      if (n < 1 || d < 1 || r < 1) throw std::invalid_argument("bad header values");
      header = true;
      continue;
    }
    Form f = Form::parse(trimmed, n);
    if (f.degree() != d) {
      throw std::invalid_argument("form degree does not match header: " + trimmed);
    }
    forms.push_back(std::move(f));
  }
  if (!header) throw std::invalid_argument("missing system header");
  if (static_cast<int>(forms.size()) != r) {
    throw std::invalid_argument("number of forms does not match header r");
  }
  return FormSystem(std::move(forms));
}

FormSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

}  // namespace formlab
