#include "expanderlab/interval.hpp"

#include <algorithm>
#include <utility>

#include "expanderlab/error.hpp"

namespace expanderlab {

Interval::Interval(long precision_bits) {
  mpfr_init2(lo_, precision_bits);
  mpfr_init2(hi_, precision_bits);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) {
  mpfr_init2(lo_, mpfr_get_prec(other.lo_));
  mpfr_init2(hi_, mpfr_get_prec(other.hi_));
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(mpfr_get_prec(other.lo_)) {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(Interval other) noexcept {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_mpz(const mpz_class& v, long precision_bits) {
  Interval r(precision_bits);
  mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_mpq(const mpq_class& v, long precision_bits) {
  Interval r(precision_bits);
  mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::power(const mpz_class& m, unsigned long num, unsigned long den,
                         long precision_bits) {
  if (m < 0 || den == 0) throw Error(ErrorCode::kInvalidArgument, "power needs m >= 0, den >= 1");
  mpz_class base;
  mpz_pow_ui(base.get_mpz_t(), m.get_mpz_t(), num);
  Interval r = from_mpz(base, precision_bits);
  if (den == 1) return r;
  // rootn is correctly rounded, so directed rounding on each endpoint encloses.
  mpfr_rootn_ui(r.lo_, r.lo_, den, MPFR_RNDD);
  mpfr_rootn_ui(r.hi_, r.hi_, den, MPFR_RNDU);
  return r;
}

Interval Interval::log(const mpz_class& v, long precision_bits) {
  if (v <= 0) throw Error(ErrorCode::kInvalidArgument, "log of a non-positive value");
  Interval r = from_mpz(v, precision_bits);
  mpfr_log(r.lo_, r.lo_, MPFR_RNDD);
  mpfr_log(r.hi_, r.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::operator+(const Interval& o) const {
  Interval r(std::max(precision(), o.precision()));
  mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-(const Interval& o) const {
  Interval r(std::max(precision(), o.precision()));
  mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
  return r;
}

Interval Interval::operator*(const Interval& o) const {
  const long prec = std::max(precision(), o.precision());
  Interval r(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  mpfr_srcptr xs[2] = {lo_, hi_};
  mpfr_srcptr ys[2] = {o.lo_, o.hi_};
  bool first = true;
  for (mpfr_srcptr x : xs) {
    for (mpfr_srcptr y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

Interval Interval::operator/(const Interval& o) const {
  if (o.contains_zero()) throw Error(ErrorCode::kDivisionByZero, "interval divisor contains zero");
  const long prec = std::max(precision(), o.precision());
  Interval inv(prec);
  // 1/[a,b] = [1/b, 1/a] when 0 ∉ [a,b].
  mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
  return *this * inv;
}

Interval Interval::pow(unsigned long k) const {
  Interval r = from_mpz(1, precision());
  for (unsigned long i = 0; i < k; ++i) r = r * *this;
  return r;
}

Interval Interval::sqrt() const {
  if (mpfr_sgn(hi_) < 0) throw Error(ErrorCode::kInvalidArgument, "sqrt of a negative interval");
  Interval r(precision());
  if (mpfr_sgn(lo_) <= 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  }
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::intersect(const Interval& o) const {
  Interval r(std::max(precision(), o.precision()));
  mpfr_max(r.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_min(r.hi_, hi_, o.hi_, MPFR_RNDU);
  return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Interval::encloses(const Interval& other) const {
  return mpfr_lessequal_p(lo_, other.lo_) && mpfr_lessequal_p(other.hi_, hi_);
}

bool Interval::certainly_le(const mpq_class& v) const { return mpfr_cmp_q(hi_, v.get_mpq_t()) <= 0; }
bool Interval::certainly_lt(const mpq_class& v) const { return mpfr_cmp_q(hi_, v.get_mpq_t()) < 0; }
bool Interval::certainly_ge(const mpq_class& v) const { return mpfr_cmp_q(lo_, v.get_mpq_t()) >= 0; }
bool Interval::certainly_gt(const mpq_class& v) const { return mpfr_cmp_q(lo_, v.get_mpq_t()) > 0; }

bool Interval::relative_width_below(long bits) const {
  if (is_point()) return true;
  const long prec = precision() + 8;
  mpfr_t width;
  mpfr_t bound;
  mpfr_init2(width, prec);
  mpfr_init2(bound, prec);
  mpfr_sub(width, hi_, lo_, MPFR_RNDU);
  mpfr_abs(bound, lo_, MPFR_RNDD);
  mpfr_div_2si(bound, bound, bits, MPFR_RNDD);
  const bool ok = mpfr_less_p(width, bound) != 0;
  mpfr_clear(width);
  mpfr_clear(bound);
  return ok;
}

namespace {

std::string render(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
  char* buf = nullptr;
  if (rnd == MPFR_RNDD) {
    mpfr_asprintf(&buf, "%.*RDe", digits, x);
  } else {
    mpfr_asprintf(&buf, "%.*RUe", digits, x);
  }
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

}  // namespace

std::string Interval::lo_string(int digits) const { return render(lo_, digits, MPFR_RNDD); }
std::string Interval::hi_string(int digits) const { return render(hi_, digits, MPFR_RNDU); }

}  // namespace expanderlab
