#ifndef EXPANDERLAB_REPORT_HPP_
#define EXPANDERLAB_REPORT_HPP_

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expanderlab/fset.hpp"
#include "expanderlab/interval.hpp"
#include "json.hpp"

namespace expanderlab {

enum class Verdict { kHolds, kFails, kSlackOnly, kInconclusive };

std::string_view verdict_name(Verdict v);

// An exact rational or a certified enclosure.
using Quantity = std::variant<mpq_class, Interval>;

Quantity exact(const mpq_class& v);
Quantity exact(const mpz_class& v);
Quantity exact(std::uint64_t v);
// lhs / rhs; exact when both are exact. Throws kDivisionByZero on a zero rhs.
Quantity ratio(const Quantity& lhs, const Quantity& rhs, long precision_bits = kDefaultStartPrecision);
bool is_finite(const Quantity& q);
bool is_exact(const Quantity& q);

// One verified relation instance.
struct InequalityReport {
  std::string name;
  Quantity lhs = mpq_class(0);
  Quantity rhs = mpq_class(0);
  Verdict verdict = Verdict::kSlackOnly;
  Quantity slack = mpq_class(0);
  std::string instance_digest;
  std::string notes;
};

// Constant-free relation lhs <= rhs (or ==), decided exactly.
InequalityReport exact_relation(std::string name, const mpq_class& lhs, const mpq_class& rhs,
                                bool equality = false);
// Relation with a hidden constant: reports lhs/rhs only.
InequalityReport slack_only(std::string name, const Quantity& lhs, const Quantity& rhs);

nlohmann::ordered_json quantity_to_json(const Quantity& q);
nlohmann::ordered_json report_to_json(const InequalityReport& r);

// Canonical JSON of a set: {"field", "p"?, "elements"}.
nlohmann::ordered_json set_to_json(const FSet& s);
// SHA-256 hex digest of the canonical JSON of the inputs plus a parameter tag.
std::string instance_digest(const std::vector<const FSet*>& sets, std::string_view params = {});

std::string render_rational(const mpq_class& q);

// Exact decisions involving sqrt(eps) for rational eps >= 0.
// r >= 1 - c·sqrt(eps)
bool ge_one_minus_c_sqrt(const mpq_class& r, unsigned long c, const mpq_class& eps);
// r >= (1 - sqrt(eps))^2, for 0 <= eps < 1 and r >= 0
bool ge_one_minus_sqrt_squared(const mpq_class& r, const mpq_class& eps);
// sqrt(q) if q is the square of a rational.
std::optional<mpq_class> exact_sqrt(const mpq_class& q);
// Enclosure (or exact value) of 1 - c·sqrt(eps).
Quantity one_minus_c_sqrt(unsigned long c, const mpq_class& eps,
                          long precision_bits = kDefaultStartPrecision);
Quantity multiply(const Quantity& a, const Quantity& b, long precision_bits = kDefaultStartPrecision);

}  // namespace expanderlab

#endif  // EXPANDERLAB_REPORT_HPP_
