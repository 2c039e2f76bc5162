#ifndef EXPANDERLAB_INTERVAL_HPP_
#define EXPANDERLAB_INTERVAL_HPP_

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace expanderlab {

inline constexpr long kDefaultStartPrecision = 128;
inline constexpr long kDefaultPrecisionCap = 4096;

// Closed interval [lo, hi] with MPFR endpoints. Every operation rounds the
// lower endpoint down and the upper endpoint up, so the true value of any
// expression built from exact inputs stays enclosed.
class Interval {
 public:
  explicit Interval(long precision_bits = kDefaultStartPrecision);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(Interval other) noexcept;
  ~Interval();

  static Interval from_mpz(const mpz_class& v, long precision_bits);
  static Interval from_mpq(const mpq_class& v, long precision_bits);
  // Encloses m^(num/den) for m >= 0, den >= 1.
  static Interval power(const mpz_class& m, unsigned long num, unsigned long den,
                        long precision_bits);
  // Encloses log(v) for v > 0.
  static Interval log(const mpz_class& v, long precision_bits);

  long precision() const { return static_cast<long>(mpfr_get_prec(lo_)); }

  Interval operator+(const Interval& o) const;
  Interval operator-(const Interval& o) const;
  Interval operator*(const Interval& o) const;
  // Throws kDivisionByZero if o contains zero.
  Interval operator/(const Interval& o) const;
  Interval pow(unsigned long k) const;
  // Endpoints clamped at zero; requires hi >= 0.
  Interval sqrt() const;
  // [max(lo), min(hi)]; both operands must enclose the same quantity.
  Interval intersect(const Interval& o) const;

  bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
  bool contains_zero() const;
  // Interval of other ⊆ this.
  bool encloses(const Interval& other) const;

  // Certified comparisons against an exact value; false means "not proven".
  bool certainly_le(const mpq_class& v) const;
  bool certainly_lt(const mpq_class& v) const;
  bool certainly_ge(const mpq_class& v) const;
  bool certainly_gt(const mpq_class& v) const;
  bool certainly_le(const Interval& o) const { return mpfr_lessequal_p(hi_, o.lo_) != 0; }
  bool certainly_gt(const Interval& o) const { return mpfr_greater_p(lo_, o.hi_) != 0; }

  // (hi - lo) < 2^-bits * |lo|, i.e. relative width below 2^-bits.
  bool relative_width_below(long bits) const;
  bool is_finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

  // Decimal renderings that still enclose: lo rounded down, hi rounded up.
  std::string lo_string(int digits = 30) const;
  std::string hi_string(int digits = 30) const;
  double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace expanderlab

#endif  // EXPANDERLAB_INTERVAL_HPP_
