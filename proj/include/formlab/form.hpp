#pragma once

#include <map>
#include <utility>
#include <vector>

#include "formlab/numeric.hpp"

namespace formlab {

// Exponent vector of a monomial; length = number of variables.
using Exponents = std::vector<int>;

// Canonical term order: graded lexicographic, largest first. Within a
// homogeneous form this is plain descending lex, which makes printing and
// hashing deterministic.
struct GrlexDesc {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

// Sparse homogeneous polynomial with exact integer coefficients.
//
// The zero polynomial (empty term map) is representable because pencil
// combinations and partial derivatives can collapse, but the user-facing
// constructors (parse / from_terms) reject it.
class Form {
 public:
  using TermMap = std::map<Exponents, Int, GrlexDesc>;

  Form() = default;

  // Merges duplicate exponent vectors, drops zero coefficients, checks
  // homogeneity. Rejects a form that collapses to zero.
  static Form from_terms(int n_vars, const std::vector<std::pair<Exponents, Int>>& terms);

  // Grammar: term (('+'|'-') term)*, term = [integer '*'] factor ('*' factor)*,
  // factor = x<index> ['^' exponent]. Whitespace ignored, optional leading sign.
  static Form parse(std::string_view text, int n_vars);

  // Degenerate value used internally (pencil outputs, derivatives).
  static Form zero(int n_vars, int degree);

  int n_vars() const { return n_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  Int evaluate(const std::vector<Int>& x) const;
  std::vector<Int> gradient_at(const std::vector<Int>& x) const;

  // Partial derivative with respect to variable `var` (1-based). Degree drops
  // by one; the result may be zero.
  Form partial(int var) const;

  // Canonical printer; round-trips through parse for nonzero forms.
  std::string str() const;

  bool operator==(const Form&) const = default;

 private:
  int n_ = 0;
  int degree_ = 0;
  TermMap terms_;
};

// r forms of common degree in common variables.
class FormSystem {
 public:
  explicit FormSystem(std::vector<Form> forms);

  int r() const { return static_cast<int>(forms_.size()); }
  int n_vars() const { return forms_.front().n_vars(); }
  int degree() const { return forms_.front().degree(); }
  const Form& form(int i) const { return forms_.at(i - 1); }  // 1-based
  const std::vector<Form>& forms() const { return forms_; }

 private:
  std::vector<Form> forms_;
};

// f_b = b_1 f_1 + ... + b_r f_r. Rejects b = 0; the result may be the zero
// form, which callers must treat as a degenerate pencil member.
Form pencil_form(const FormSystem& sys, const std::vector<Int>& b);

// Symmetric multilinear form associated with f, evaluated on d vectors via
// the inclusion-exclusion identity
//   Gamma_f(x1,...,xd) = sum_{0 != S subset {1..d}} (-1)^{d-|S|} f(sum_{i in S} xi),
// so Gamma_f(x,...,x) = d! f(x).
Int polarize(const Form& f, const std::vector<std::vector<Int>>& xs);

// Gamma_i(e_j, x^(2), ..., x^(d)) for the i-th form (i, j 1-based).
Int multilinear_basis_row(const FormSystem& sys, int i, int j,
                          const std::vector<std::vector<Int>>& xs);

// Gamma_f(e_j, .) written out as a homogeneous form of degree d-1 in the
// n*(d-1) coordinates of (x^(2), ..., x^(d)), laid out block by block. Used to
// turn multilinear zero-counting into plain lattice counting.
Form multilinear_equation(const Form& f, int j);

// Integer Hessian (d^2 f / dx_j dx_k); requires degree 2. Equals twice the
// rational Gram matrix, so it carries the same rank.
std::vector<std::vector<Int>> hessian_matrix(const Form& f);

// Per-coordinate rational closed intervals inside [-1,1]^n.
class Box {
 public:
  static Box unit(int n_vars);
  // "lo:hi,lo:hi,..." with rational endpoints; a single "lo:hi" pair is
  // replicated across all coordinates.
  static Box parse(std::string_view text, int n_vars);
  explicit Box(std::vector<std::pair<Rat, Rat>> intervals);

  int n_vars() const { return static_cast<int>(intervals_.size()); }
  const std::vector<std::pair<Rat, Rat>>& intervals() const { return intervals_; }
  std::string str() const;

 private:
  std::vector<std::pair<Rat, Rat>> intervals_;
};

// System file format: header line "n=<int> d=<int> r=<int>", then one form
// per line; '#' starts a comment; blank lines ignored.
FormSystem parse_system(std::string_view text);
FormSystem load_system_file(const std::string& path);

}  // namespace formlab
