#include "expanderlab/field.hpp"

#include <array>
#include <limits>

namespace expanderlab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPrimeModulus: return "NonPrimeModulus";
    case ErrorCode::kMissingModulus: return "MissingModulus";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kContextMismatch: return "ContextMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kZeroDilation: return "ZeroDilation";
    case ErrorCode::kZeroElementPresent: return "ZeroElementPresent";
    case ErrorCode::kTOutOfRange: return "TOutOfRange";
    case ErrorCode::kPrecisionCapExceeded: return "PrecisionCapExceeded";
    case ErrorCode::kZeroTwist: return "ZeroTwist";
    case ErrorCode::kEpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::kGraphTooSparse: return "GraphTooSparse";
    case ErrorCode::kCollisionFound: return "CollisionFound";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kDuplicateInput: return "DuplicateInput";
    case ErrorCode::kFieldMismatch: return "FieldMismatch";
    case ErrorCode::kWitnessFailure: return "WitnessFailure";
    case ErrorCode::kUnknownRelation: return "UnknownRelation";
    case ErrorCode::kSideConditionViolated: return "SideConditionViolated";
    case ErrorCode::kSetTooSmall: return "SetTooSmall";
    case ErrorCode::kDensityViolated: return "DensityViolated";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// The first twelve primes are a deterministic witness set for n < 3.3e24.
bool miller_rabin_u64(u64 n) {
  if (n < 2) return false;
  constexpr std::array<u64, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 b : kBases) {
    if (n % b == 0) return n == b;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : kBases) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t()) && sizeof(unsigned long) == sizeof(u64)) {
    return miller_rabin_u64(n.get_ui());
  }
  return mpz_probab_prime_p(n.get_mpz_t(), 50) > 0;
}

FieldCtx FieldCtx::make(FieldKind kind, std::optional<mpz_class> p) {
  if (kind == FieldKind::kRational) return rational();
  if (!p) throw Error(ErrorCode::kMissingModulus, "prime field requires a modulus");
  return prime_field(*p);
}

FieldCtx FieldCtx::prime_field(const mpz_class& p) {
  if (!is_prime(p)) {
    throw Error(ErrorCode::kNonPrimeModulus, p.get_str() + " is not prime");
  }
  return FieldCtx(FieldKind::kPrimeField, p);
}

FieldCtx FieldCtx::rational() { return FieldCtx(FieldKind::kRational, mpz_class(0)); }

const mpz_class& FieldCtx::modulus() const {
  if (kind_ != FieldKind::kPrimeField) {
    throw Error(ErrorCode::kMissingModulus, "rational context has no modulus");
  }
  return p_;
}

std::optional<std::uint64_t> FieldCtx::small_modulus() const {
  if (kind_ != FieldKind::kPrimeField) return std::nullopt;
  if (p_ >= mpz_class("4294967296")) return std::nullopt;
  return static_cast<std::uint64_t>(p_.get_ui());
}

std::string FieldCtx::describe() const {
  return is_prime_field() ? "fp:" + p_.get_str() : "q";
}

Elem FieldCtx::reduce(mpz_class v) const {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), p_.get_mpz_t());
  return Elem(mpq_class(r));
}

Elem FieldCtx::from_mpz(const mpz_class& v) const {
  if (is_prime_field()) return reduce(v);
  return Elem(mpq_class(v));
}

Elem FieldCtx::from_fraction(const mpz_class& num, const mpz_class& den) const {
  if (den == 0) throw Error(ErrorCode::kDivisionByZero, "zero denominator");
  if (is_prime_field()) return div(from_mpz(num), from_mpz(den));
  mpq_class q(num, den);
  q.canonicalize();
  return Elem(std::move(q));
}

Elem FieldCtx::from_canonical(const mpq_class& v) const {
  mpq_class q(v);
  q.canonicalize();
  if (is_rational()) return Elem(std::move(q));
  Elem e{std::move(q)};
  require_member(e);
  return e;
}

bool FieldCtx::contains(const Elem& e) const {
  // Elems are only ever built canonical, so every value is a valid rational.
  if (is_rational()) return true;
  return e.is_integer() && sgn(e.numerator()) >= 0 && e.numerator() < p_;
}

void FieldCtx::require_member(const Elem& e) const {
  if (!contains(e)) {
    throw Error(ErrorCode::kContextMismatch,
                "element " + e.value().get_str() + " is not canonical in " + describe());
  }
}

Elem FieldCtx::add(const Elem& a, const Elem& b) const {
  require_member(a);
  require_member(b);
  if (is_prime_field()) return reduce(a.numerator() + b.numerator());
  return Elem(mpq_class(a.value_ + b.value_));
}

Elem FieldCtx::sub(const Elem& a, const Elem& b) const {
  require_member(a);
  require_member(b);
  if (is_prime_field()) return reduce(a.numerator() - b.numerator());
  return Elem(mpq_class(a.value_ - b.value_));
}

Elem FieldCtx::mul(const Elem& a, const Elem& b) const {
  require_member(a);
  require_member(b);
  if (is_prime_field()) return reduce(a.numerator() * b.numerator());
  return Elem(mpq_class(a.value_ * b.value_));
}

Elem FieldCtx::inv(const Elem& a) const {
  require_member(a);
  if (a.is_zero()) throw Error(ErrorCode::kDivisionByZero, "inverse of zero");
  if (is_prime_field()) {
    mpz_class r;
    mpz_invert(r.get_mpz_t(), a.numerator().get_mpz_t(), p_.get_mpz_t());
    return Elem(mpq_class(r));
  }
  return Elem(mpq_class(1 / a.value_));
}

Elem FieldCtx::div(const Elem& a, const Elem& b) const {
  require_member(b);
  if (b.is_zero()) throw Error(ErrorCode::kDivisionByZero, "division by zero");
  return mul(a, inv(b));
}

Elem FieldCtx::neg(const Elem& a) const {
  require_member(a);
  if (is_prime_field()) return reduce(-a.numerator());
  return Elem(mpq_class(-a.value_));
}

namespace {

bool parse_integer(std::string_view text, mpz_class& out) {
  if (text.empty()) return false;
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) return false;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') return false;
  }
  std::string s(text[0] == '+' ? text.substr(1) : text);
  return out.set_str(s, 10) == 0;
}

}  // namespace

Elem FieldCtx::parse(std::string_view text) const {
  const auto slash = text.find('/');
  mpz_class num;
  mpz_class den(1);
  const bool ok = slash == std::string_view::npos
                      ? parse_integer(text, num)
                      : parse_integer(text.substr(0, slash), num) &&
                            parse_integer(text.substr(slash + 1), den);
  if (!ok) throw Error(ErrorCode::kParseError, "malformed element '" + std::string(text) + "'");
  if (is_prime_field()) {
    if (slash != std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "fractions are not residues: '" + std::string(text) + "'");
    }
    if (num < 0 || num >= p_) {
      throw Error(ErrorCode::kContextMismatch,
                  "residue " + num.get_str() + " out of range for " + describe());
    }
    return Elem(mpq_class(num));
  }
  return from_fraction(num, den);
}

std::string FieldCtx::render(const Elem& e) const {
  require_member(e);
  if (e.is_integer()) return e.numerator().get_str();
  return e.numerator().get_str() + "/" + e.denominator().get_str();
}

}  // namespace expanderlab
