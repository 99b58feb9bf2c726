#include "formlab/guarded.hpp"

#include <mpfr.h>

#include <optional>

namespace formlab {

namespace {

// [lo, hi] enclosure of base^exponent at the given precision.
struct Enclosure {
  mpfr_t lo, hi;
  Enclosure(const Rat& base, const Rat& exponent, int bits) {
    mpfr_init2(lo, bits);
    mpfr_init2(hi, bits);
    mpfr_t log_lo, log_hi, e_lo, e_hi, m_lo, m_hi;
    mpfr_inits2(bits, log_lo, log_hi, e_lo, e_hi, m_lo, m_hi, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_q(log_lo, base.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(log_hi, base.get_mpq_t(), MPFR_RNDU);
    mpfr_log(log_lo, log_lo, MPFR_RNDD);
    mpfr_log(log_hi, log_hi, MPFR_RNDU);
    mpfr_set_q(e_lo, exponent.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(e_hi, exponent.get_mpq_t(), MPFR_RNDU);
    // m = e * log(base): take the min/max over the four rounded corner products
    mpfr_t cand;
    mpfr_init2(cand, bits);
    bool first = true;
    for (int i = 0; i < 4; ++i) {
      mpfr_srcptr e = (i & 1) ? e_hi : e_lo;
      mpfr_srcptr l = (i & 2) ? log_hi : log_lo;
      mpfr_mul(cand, e, l, MPFR_RNDD);
      if (first || mpfr_cmp(cand, m_lo) < 0) mpfr_set(m_lo, cand, MPFR_RNDD);
      mpfr_mul(cand, e, l, MPFR_RNDU);
      if (first || mpfr_cmp(cand, m_hi) > 0) mpfr_set(m_hi, cand, MPFR_RNDU);
      first = false;
    }
    mpfr_exp(lo, m_lo, MPFR_RNDD);
    mpfr_exp(hi, m_hi, MPFR_RNDU);
    mpfr_clears(log_lo, log_hi, e_lo, e_hi, m_lo, m_hi, cand, static_cast<mpfr_ptr>(nullptr));
  }
  ~Enclosure() {
    mpfr_clear(lo);
    mpfr_clear(hi);
  }
};

// base^exponent when the result is rational: integral exponents, and
// fractional ones whose numerator/denominator powers admit exact roots.
// A failed exact root certifies the value is irrational, so the interval
// fallback always separates it from any rational operand eventually.
std::optional<Rat> exact_pow(const Rat& base, const Rat& exponent) {
  if (!exponent.get_num().fits_slong_p() || !exponent.get_den().fits_ulong_p()) {
    return std::nullopt;
  }
  long p = exponent.get_num().get_si();
  unsigned long q = exponent.get_den().get_ui();
  if (q == 1) return pow_rat(base, p);
  unsigned long ap = static_cast<unsigned long>(p < 0 ? -p : p);
  if (ap > 64 || mpz_sizeinbase(base.get_num().get_mpz_t(), 2) * ap > 1'000'000) {
    return std::nullopt;
  }
  Int num_pow = pow_int(base.get_num(), ap);
  Int den_pow = pow_int(base.get_den(), ap);
  Int num_root, den_root;
  bool num_exact = mpz_root(num_root.get_mpz_t(), num_pow.get_mpz_t(), q) != 0;
  bool den_exact = mpz_root(den_root.get_mpz_t(), den_pow.get_mpz_t(), q) != 0;
  if (!num_exact || !den_exact) return std::nullopt;
  Rat r(num_root, den_root);
  r.canonicalize();
  if (p < 0) r = 1 / r;
  return r;
}

}  // namespace

PowThreshold::PowThreshold(const Rat& base, const Rat& exponent, int max_bits)
    : base_(base), exponent_(exponent), max_bits_(max_bits) {
  if (base <= 0) throw std::domain_error("power threshold needs a positive base");
  if (auto v = exact_pow(base, exponent)) {
    exact_ = true;
    exact_value_ = *v;
  }
}

const Rat& PowThreshold::exact_value() const {
  if (!exact_) throw std::logic_error("threshold is not exactly rational");
  return exact_value_;
}

bool PowThreshold::less_than(const Rat& x) const {
  if (exact_) return x < exact_value_;
  for (int bits = 64; bits <= max_bits_; bits *= 2) {
    Enclosure enc(base_, exponent_, bits);
    if (mpfr_cmp_q(enc.lo, x.get_mpq_t()) > 0) return true;   // x < lo <= value
    if (mpfr_cmp_q(enc.hi, x.get_mpq_t()) <= 0) return false;  // value <= hi <= x
  }
  throw PrecisionError("comparison against " + to_string(base_) + "^" + to_string(exponent_) +
                       " undecidable at " + std::to_string(max_bits_) + " bits");
}

double PowThreshold::approx() const {
  if (exact_) return exact_value_.get_d();
  Enclosure enc(base_, exponent_, 64);
  return (mpfr_get_d(enc.lo, MPFR_RNDN) + mpfr_get_d(enc.hi, MPFR_RNDN)) / 2;
}

Int guarded_floor_pow(const Rat& base, const Rat& exponent, int max_bits) {
  if (base <= 0) throw std::domain_error("power floor needs a positive base");
  if (auto v = exact_pow(base, exponent)) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), v->get_num().get_mpz_t(), v->get_den().get_mpz_t());
    return q;
  }
  for (int bits = 64; bits <= max_bits; bits *= 2) {
    Enclosure enc(base, exponent, bits);
    mpz_class flo, fhi;
    mpfr_get_z(flo.get_mpz_t(), enc.lo, MPFR_RNDD);
    mpfr_get_z(fhi.get_mpz_t(), enc.hi, MPFR_RNDD);
    if (flo == fhi) return flo;
  }
  throw PrecisionError("floor of " + to_string(base) + "^" + to_string(exponent) +
                       " undecidable at " + std::to_string(max_bits) + " bits");
}

}  // namespace formlab
