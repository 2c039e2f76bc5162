#include "expanderlab/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace expanderlab {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "Holds";
    case Verdict::kFails: return "Fails";
    case Verdict::kSlackOnly: return "SlackOnly";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "?";
}

Quantity exact(const mpq_class& v) { return v; }
Quantity exact(const mpz_class& v) { return mpq_class(v); }
Quantity exact(std::uint64_t v) { return mpq_class(mpz_class(static_cast<unsigned long>(v))); }

bool is_exact(const Quantity& q) { return std::holds_alternative<mpq_class>(q); }

bool is_finite(const Quantity& q) {
  if (is_exact(q)) return true;
  return std::get<Interval>(q).is_finite();
}

namespace {

Interval as_interval(const Quantity& q, long prec) {
  if (const auto* e = std::get_if<mpq_class>(&q)) return Interval::from_mpq(*e, prec);
  return std::get<Interval>(q);
}

}  // namespace

Quantity ratio(const Quantity& lhs, const Quantity& rhs, long precision_bits) {
  if (is_exact(lhs) && is_exact(rhs)) {
    const auto& d = std::get<mpq_class>(rhs);
    if (sgn(d) == 0) throw Error(ErrorCode::kDivisionByZero, "slack with zero right-hand side");
    return mpq_class(std::get<mpq_class>(lhs) / d);
  }
  return as_interval(lhs, precision_bits) / as_interval(rhs, precision_bits);
}

Quantity multiply(const Quantity& a, const Quantity& b, long precision_bits) {
  if (is_exact(a) && is_exact(b)) return mpq_class(std::get<mpq_class>(a) * std::get<mpq_class>(b));
  return as_interval(a, precision_bits) * as_interval(b, precision_bits);
}

InequalityReport exact_relation(std::string name, const mpq_class& lhs, const mpq_class& rhs,
                                bool equality) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  const bool ok = equality ? cmp(lhs, rhs) == 0 : cmp(lhs, rhs) <= 0;
  r.verdict = ok ? Verdict::kHolds : Verdict::kFails;
  if (sgn(rhs) != 0) {
    r.slack = mpq_class(lhs / rhs);
  } else {
    // 0 <= 0 has slack 1 by convention; anything else over 0 is unbounded.
    r.slack = mpq_class(sgn(lhs) == 0 ? 1 : 0);
    if (sgn(lhs) != 0) r.notes = "rhs is zero";
  }
  return r;
}

InequalityReport slack_only(std::string name, const Quantity& lhs, const Quantity& rhs) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.verdict = Verdict::kSlackOnly;
  r.slack = ratio(lhs, rhs);
  return r;
}

std::string render_rational(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

nlohmann::ordered_json quantity_to_json(const Quantity& q) {
  if (const auto* e = std::get_if<mpq_class>(&q)) return render_rational(*e);
  const auto& iv = std::get<Interval>(q);
  nlohmann::ordered_json j;
  j["lo"] = iv.lo_string();
  j["hi"] = iv.hi_string();
  j["precision_bits"] = iv.precision();
  return j;
}

nlohmann::ordered_json report_to_json(const InequalityReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["verdict"] = std::string(verdict_name(r.verdict));
  j["lhs"] = quantity_to_json(r.lhs);
  j["rhs"] = quantity_to_json(r.rhs);
  j["slack"] = quantity_to_json(r.slack);
  j["instance_digest"] = r.instance_digest;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

nlohmann::ordered_json set_to_json(const FSet& s) {
  nlohmann::ordered_json j;
  if (s.ctx().is_prime_field()) {
    j["field"] = "fp";
    const auto& p = s.ctx().modulus();
    if (p.fits_slong_p()) {
      j["p"] = p.get_si();
    } else {
      j["p"] = p.get_str();
    }
    auto elems = nlohmann::ordered_json::array();
    for (const Elem& e : s) {
      if (e.numerator().fits_slong_p()) {
        elems.push_back(e.numerator().get_si());
      } else {
        elems.push_back(e.numerator().get_str());
      }
    }
    j["elements"] = std::move(elems);
  } else {
    j["field"] = "q";
    j["elements"] = s.render();
  }
  return j;
}

std::string instance_digest(const std::vector<const FSet*>& sets, std::string_view params) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const FSet* s : sets) j.push_back(set_to_json(*s));
  std::string payload = j.dump();
  payload.push_back('|');
  payload.append(params);

  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(payload.data(), payload.size(), md.data(), &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

bool ge_one_minus_c_sqrt(const mpq_class& r, unsigned long c, const mpq_class& eps) {
  // r >= 1 - c·sqrt(eps)  <=>  1 - r <= c·sqrt(eps)
  const mpq_class gap = 1 - r;
  if (sgn(gap) <= 0) return true;
  return gap * gap <= mpq_class(c * c) * eps;
}

bool ge_one_minus_sqrt_squared(const mpq_class& r, const mpq_class& eps) {
  // r >= (1 - sqrt(eps))^2  <=>  sqrt(r) + sqrt(eps) >= 1
  //                         <=>  2·sqrt(eps) >= 1 + eps - r
  if (r >= 1) return true;
  const mpq_class rhs = 1 + eps - r;
  if (sgn(rhs) <= 0) return true;
  return 4 * eps >= rhs * rhs;
}

std::optional<mpq_class> exact_sqrt(const mpq_class& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) {
    return std::nullopt;
  }
  mpz_class n;
  mpz_class d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  return mpq_class(n, d);
}

Quantity one_minus_c_sqrt(unsigned long c, const mpq_class& eps, long precision_bits) {
  if (auto s = exact_sqrt(eps)) return mpq_class(1 - c * *s);
  Interval root = Interval::from_mpq(eps, precision_bits).sqrt();
  return Interval::from_mpz(1, precision_bits) -
         Interval::from_mpz(mpz_class(c), precision_bits) * root;
}

}  // namespace expanderlab
