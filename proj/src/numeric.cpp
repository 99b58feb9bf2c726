#include "formlab/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace formlab {

Rat parse_rational(std::string_view text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('.') != std::string::npos) {
    throw std::invalid_argument("decimal notation rejected, use p/q: '" + s + "'");
  }
  auto is_integer = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    }
    return true;
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!is_integer(s)) throw std::invalid_argument("bad rational literal: '" + s + "'");
    return Rat(Int(s));
  }
  std::string num = s.substr(0, slash);
  std::string den = s.substr(slash + 1);
  if (!is_integer(num) || !is_integer(den)) {
    throw std::invalid_argument("bad rational literal: '" + s + "'");
  }
  Int d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
  Rat r(Int(num), d);
  r.canonicalize();
  return r;
}

std::string to_string(const Int& v) { return v.get_str(); }

std::string to_string(const Rat& v) { return v.get_str(); }

Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Rat pow_rat(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  if (base == 0 && e < 0) throw std::domain_error("0 raised to a negative power");
  unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
  Rat r(pow_int(base.get_num(), a), pow_int(base.get_den(), a));
  r.canonicalize();
  if (e < 0) r = 1 / r;
  return r;
}

static std::int64_t to_i64_checked(const Int& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("integer out of int64 range: " + v.get_str());
  return static_cast<std::int64_t>(v.get_si());
}

std::int64_t floor_to_i64(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return to_i64_checked(q);
}

std::int64_t ceil_to_i64(const Rat& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return to_i64_checked(q);
}

Int content(const std::vector<Int>& v) {
  Int g = 0;
  for (const Int& x : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

std::vector<Int> primitive_vector(std::vector<Int> v) {
  Int g = content(v);
  if (g == 0) return v;
  int lead = 0;
  for (const Int& x : v) {
    if (x != 0) {
      lead = sgn(x);
      break;
    }
  }
  if (lead < 0) g = -g;
  for (Int& x : v) x /= g;
  return v;
}

Int round_half_away(const Rat& x) {
  // floor((2|x| + 1) / 2) with the sign restored
  Rat a = abs(x);
  Int num = a.get_num() * 2 + a.get_den();
  Int den = a.get_den() * 2;
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return sgn(x) < 0 ? Int(-q) : q;
}

std::uint64_t isqrt_u64(std::uint64_t n) {
  if (n == 0) return 0;
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (s > 0 && s > n / s) --s;
  while ((s + 1) <= n / (s + 1)) ++s;
  return s;
}

bool perfect_square_i128(__int128 n, std::int64_t* root) {
  if (n < 0) return false;
  auto nu = static_cast<unsigned __int128>(n);
  // start from a double estimate, then fix up in the exact domain
  auto s = static_cast<unsigned __int128>(std::sqrt(static_cast<double>(nu)));
  while (s > 0 && s * s > nu) --s;
  while ((s + 1) * (s + 1) <= nu) ++s;
  if (s * s != nu) return false;
  if (root) *root = static_cast<std::int64_t>(s);
  return true;
}

}  // namespace formlab
