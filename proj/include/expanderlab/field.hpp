#ifndef EXPANDERLAB_FIELD_HPP_
#define EXPANDERLAB_FIELD_HPP_

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "expanderlab/error.hpp"

namespace expanderlab {

enum class FieldKind { kPrimeField, kRational };

// A field element in canonical form. For F_p the value is an integer in
// [0, p); for Q it is a reduced fraction with positive denominator. Elements
// do not carry their context: arithmetic goes through FieldCtx, which rejects
// values that are not canonical members of its field.
class Elem {
 public:
  Elem() = default;

  const mpq_class& value() const { return value_; }
  const mpz_class& numerator() const { return value_.get_num(); }
  const mpz_class& denominator() const { return value_.get_den(); }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  friend bool operator==(const Elem& a, const Elem& b) {
    return cmp(a.value_, b.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Elem& a, const Elem& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

 private:
  friend class FieldCtx;
  explicit Elem(mpq_class v) : value_(std::move(v)) {}
  mpq_class value_;
};

class FieldCtx {
 public:
  // Throws kNonPrimeModulus / kMissingModulus.
  static FieldCtx make(FieldKind kind, std::optional<mpz_class> p = std::nullopt);
  static FieldCtx prime_field(const mpz_class& p);
  static FieldCtx prime_field(std::uint64_t p) { return prime_field(mpz_class(p)); }
  static FieldCtx rational();

  FieldKind kind() const { return kind_; }
  bool is_prime_field() const { return kind_ == FieldKind::kPrimeField; }
  bool is_rational() const { return kind_ == FieldKind::kRational; }

  // Throws kMissingModulus for the rational context.
  const mpz_class& modulus() const;
  // p when the context is F_p with p < 2^32; enables the word-sized kernels.
  std::optional<std::uint64_t> small_modulus() const;

  // "fp:101" or "q".
  std::string describe() const;

  friend bool operator==(const FieldCtx& a, const FieldCtx& b) {
    return a.kind_ == b.kind_ && (a.kind_ == FieldKind::kRational || a.p_ == b.p_);
  }

  Elem zero() const { return Elem(); }
  Elem one() const { return from_int(1); }
  Elem from_int(long v) const { return from_mpz(mpz_class(v)); }
  Elem from_mpz(const mpz_class& v) const;
  // Rational context only; reduces the fraction. Throws kDivisionByZero.
  Elem from_fraction(const mpz_class& num, const mpz_class& den) const;
  // Wraps a value already known to be canonical. Throws kContextMismatch if not.
  Elem from_canonical(const mpq_class& v) const;

  // True iff e is a canonical member of this field.
  bool contains(const Elem& e) const;
  // Throws kContextMismatch unless contains(e).
  void require_member(const Elem& e) const;

  Elem add(const Elem& a, const Elem& b) const;
  Elem sub(const Elem& a, const Elem& b) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem div(const Elem& a, const Elem& b) const;  // kDivisionByZero on b == 0
  Elem neg(const Elem& a) const;
  Elem inv(const Elem& a) const;

  // Text form: decimal integer for F_p, "num/den" (or an integer) for Q.
  // parse accepts any integer for F_p only if it is already in [0, p).
  Elem parse(std::string_view text) const;
  std::string render(const Elem& e) const;

 private:
  FieldCtx(FieldKind kind, mpz_class p) : kind_(kind), p_(std::move(p)) {}

  Elem reduce(mpz_class v) const;

  FieldKind kind_;
  mpz_class p_;  // 0 for the rational context
};

// Deterministic Miller-Rabin below 2^64, BPSW plus 50 Miller-Rabin rounds above.
bool is_prime(const mpz_class& n);

}  // namespace expanderlab

#endif  // EXPANDERLAB_FIELD_HPP_
