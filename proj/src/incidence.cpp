#include "expanderlab/incidence.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <map>
#include <set>

#include "expanderlab/energy.hpp"
#include "expanderlab/set_arith.hpp"

namespace expanderlab {

namespace {

using u64 = std::uint64_t;

const FieldCtx& rationals() {
  static const FieldCtx q = FieldCtx::rational();
  return q;
}

mpq_class q(u64 v) { return mpq_class(mpz_class(static_cast<unsigned long>(v))); }

void require_rational(const FSet& s) {
  if (!s.ctx().is_rational()) {
    throw Error(ErrorCode::kFieldMismatch, "incidence geometry needs the rational context");
  }
}

// Per-point counting through line keys: a non-vertical line of slope m
// through (x, y) has intercept y - m x.
class LineIndex {
 public:
  explicit LineIndex(const std::vector<Line>& lines) : keys_(lines.begin(), lines.end()) {
    for (const Line& l : lines) {
      if (!l.vertical) slopes_.insert(l.m);
    }
  }

  u64 through(const Point& p) const {
    const FieldCtx& k = rationals();
    u64 n = keys_.count(vertical_line(p.x));
    for (const Elem& m : slopes_) {
      n += keys_.count(line_through_slope(m, k.sub(p.y, k.mul(m, p.x))));
    }
    return n;
  }

  bool has(const Line& l) const { return keys_.count(l) != 0; }

 private:
  std::set<Line> keys_;
  std::set<Elem> slopes_;
};

std::optional<Point> intersect(const Line& a, const Line& b) {
  const FieldCtx& k = rationals();
  if (a.vertical && b.vertical) return std::nullopt;
  if (a.vertical) return Point{a.c, k.add(k.mul(b.m, a.c), b.c)};
  if (b.vertical) return Point{b.c, k.add(k.mul(a.m, b.c), a.c)};
  if (a.m == b.m) return std::nullopt;
  const Elem x = k.div(k.sub(b.c, a.c), k.sub(a.m, b.m));
  return Point{x, k.add(k.mul(a.m, x), a.c)};
}

// a x + b y = c with small integer coefficients.
struct IntLine {
  std::int64_t a, b, c;
};

constexpr std::int64_t kIntCoeffBound = std::int64_t{1} << 30;

bool fits(const mpz_class& v) { return abs(v) < kIntCoeffBound; }

// Scales every line to integer coefficients; nullopt when one is too large
// for exact int64 intersection arithmetic.
std::optional<std::vector<IntLine>> integer_lines(const std::vector<Line>& lines) {
  std::vector<IntLine> out;
  out.reserve(lines.size());
  for (const Line& l : lines) {
    mpz_class a, b, c;
    if (l.vertical) {
      a = l.c.value().get_den();
      b = 0;
      c = l.c.value().get_num();
    } else {
      // m x - y = -c, scaled by lcm of the denominators.
      const mpq_class& m = l.m.value();
      const mpq_class& cc = l.c.value();
      mpz_class scale;
      mpz_lcm(scale.get_mpz_t(), m.get_den_mpz_t(), cc.get_den_mpz_t());
      a = m.get_num() * (scale / m.get_den());
      b = -scale;
      c = -cc.get_num() * (scale / cc.get_den());
    }
    if (!fits(a) || !fits(b) || !fits(c)) return std::nullopt;
    out.push_back({a.get_si(), b.get_si(), c.get_si()});
  }
  return out;
}

// Intersection as a reduced triple (x d, y d, d) with d > 0.
using PointKey = std::array<std::int64_t, 3>;

std::optional<PointKey> intersect(const IntLine& p, const IntLine& r) {
  const std::int64_t det = p.a * r.b - r.a * p.b;
  if (det == 0) return std::nullopt;
  std::int64_t x = p.c * r.b - r.c * p.b;
  std::int64_t y = p.a * r.c - r.a * p.c;
  std::int64_t d = det;
  if (d < 0) {
    x = -x;
    y = -y;
    d = -d;
  }
  const std::int64_t g = std::gcd(std::gcd(x, y), d);
  return PointKey{x / g, y / g, d / g};
}

// Intersection point -> number of lines through it. A point on r lines is
// hit by r(r-1)/2 pairs.
u64 lines_from_pairs(u64 pairs) {
  u64 r = 2;
  while (r * (r - 1) / 2 < pairs) ++r;
  if (r * (r - 1) / 2 != pairs) throw Error(ErrorCode::kWitnessFailure, "inconsistent pair count");
  return r;
}

using KeyDegrees = std::vector<std::pair<PointKey, u64>>;

// Sorted intersection keys on at least min_lines lines; nullopt when the
// lines do not fit the integer path.
std::optional<KeyDegrees> integer_degrees(const std::vector<Line>& lines, u64 min_lines) {
  const auto ints = integer_lines(lines);
  if (!ints) return std::nullopt;
  std::vector<PointKey> keys;
  for (std::size_t i = 0; i < ints->size(); ++i) {
    for (std::size_t j = i + 1; j < ints->size(); ++j) {
      if (auto p = intersect((*ints)[i], (*ints)[j])) keys.push_back(*p);
    }
  }
  std::sort(keys.begin(), keys.end());
  KeyDegrees out;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const u64 deg = lines_from_pairs(j - i);
    if (deg >= min_lines) out.emplace_back(keys[i], deg);
    i = j;
  }
  return out;
}

// Reduced (x d, y d, d) for a point, matching intersect().
std::optional<PointKey> key_of(const Point& p) {
  const mpq_class& x = p.x.value();
  const mpq_class& y = p.y.value();
  mpz_class d;
  mpz_lcm(d.get_mpz_t(), x.get_den_mpz_t(), y.get_den_mpz_t());
  const mpz_class xd = x.get_num() * (d / x.get_den());
  const mpz_class yd = y.get_num() * (d / y.get_den());
  if (!xd.fits_slong_p() || !yd.fits_slong_p() || !d.fits_slong_p()) return std::nullopt;
  return PointKey{xd.get_si(), yd.get_si(), d.get_si()};
}

// Only points on at least min_lines lines are kept.
std::map<Point, u64> intersection_degrees(const std::vector<Line>& lines, u64 min_lines = 2) {
  std::map<Point, u64> out;
  if (const auto keyed = integer_degrees(lines, min_lines)) {
    for (const auto& [key, deg] : *keyed) {
      const mpz_class d(static_cast<long>(key[2]));
      out.emplace_hint(out.end(),
                       make_point(mpq_class(mpz_class(static_cast<long>(key[0])), d),
                                  mpq_class(mpz_class(static_cast<long>(key[1])), d)),
                       deg);
    }
    return out;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (auto p = intersect(lines[i], lines[j])) ++out[*p];
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it->second = lines_from_pairs(it->second);
    it = it->second < min_lines ? out.erase(it) : std::next(it);
  }
  return out;
}

}  // namespace

bool Line::contains(const Point& p) const {
  const FieldCtx& k = rationals();
  if (vertical) return p.x == c;
  return p.y == k.add(k.mul(m, p.x), c);
}

std::string Line::render() const {
  const FieldCtx& k = rationals();
  if (vertical) return "x = " + k.render(c);
  return "y = " + k.render(m) + "x + " + k.render(c);
}

Line line_through_slope(const Elem& m, const Elem& c) { return Line{false, m, c, std::nullopt}; }
Line vertical_line(const Elem& c) { return Line{true, Elem(), c, std::nullopt}; }

Point make_point(long x, long y) {
  return Point{rationals().from_int(x), rationals().from_int(y)};
}

Point make_point(const mpq_class& x, const mpq_class& y) {
  return Point{rationals().from_canonical(x), rationals().from_canonical(y)};
}

void require_distinct(const std::vector<Point>& points) {
  std::vector<Point> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kDuplicateInput, "repeated point");
  }
}

void require_distinct(const std::vector<Line>& lines) {
  std::vector<Line> sorted = lines;
  std::sort(sorted.begin(), sorted.end());
  auto it = std::adjacent_find(sorted.begin(), sorted.end());
  if (it != sorted.end()) throw Error(ErrorCode::kDuplicateInput, "repeated line " + it->render());
}

u64 count_incidences(const std::vector<Point>& points, const std::vector<Line>& lines) {
  require_distinct(points);
  require_distinct(lines);
  const LineIndex index(lines);
  u64 by_point = 0;
  for (const Point& p : points) by_point += index.through(p);
  u64 by_line = 0;
  for (const Line& l : lines) {
    by_line += std::count_if(points.begin(), points.end(), [&](const Point& p) { return l.contains(p); });
  }
  if (by_point != by_line) {
    throw Error(ErrorCode::kWitnessFailure, "incidence counts disagree: " + std::to_string(by_point) +
                                                " vs " + std::to_string(by_line));
  }
  return by_point;
}

u64 incidences_at(const Point& p, const std::vector<Line>& lines) {
  return std::count_if(lines.begin(), lines.end(), [&](const Line& l) { return l.contains(p); });
}

std::vector<Point> intersection_points(const std::vector<Line>& lines) {
  std::vector<Point> out;
  for (const auto& [p, r] : intersection_degrees(lines)) out.push_back(p);
  return out;
}

RichPointsResult rich_points(const std::optional<std::vector<Point>>& points,
                             const std::vector<Line>& lines, u64 k) {
  if (k == 0) throw Error(ErrorCode::kTOutOfRange, "k must be at least 1");
  require_distinct(lines);
  RichPointsResult r;
  r.k = k;
  if (points) {
    require_distinct(*points);
    const LineIndex index(lines);
    for (const Point& p : *points) {
      if (index.through(p) >= k) r.points.push_back(p);
    }
    std::sort(r.points.begin(), r.points.end());
  } else {
    r.from_intersections = true;
    for (const auto& [p, deg] : intersection_degrees(lines, k)) {
      if (deg >= k) r.points.push_back(p);
    }
  }
  const mpq_class l = q(lines.size());
  r.shape = l * l / (q(k) * q(k) * q(k)) + l / q(k);
  r.slack = r.shape == 0 ? mpq_class(0) : q(r.points.size()) / r.shape;
  return r;
}

Quantity st_slack(u64 incidences, u64 points, u64 lines, long precision_bits) {
  const mpz_class pl = mpz_class(static_cast<unsigned long>(points)) * static_cast<unsigned long>(lines);
  const mpq_class linear = q(points) + q(lines);
  mpz_class root;
  if (mpz_root(root.get_mpz_t(), pl.get_mpz_t(), 3) != 0) {
    const mpq_class shape = mpq_class(root * root) + linear;
    if (shape == 0) return mpq_class(0);
    return mpq_class(q(incidences) / shape);
  }
  const Interval shape =
      Interval::power(pl, 2, 3, precision_bits) + Interval::from_mpq(linear, precision_bits);
  return Interval::from_mpq(q(incidences), precision_bits) / shape;
}

LineFamily expander_line_family(const FSet& a, const FSet& b) {
  require_rational(a);
  require_rational(b);
  if (b.contains_zero()) throw Error(ErrorCode::kZeroElementPresent, "0 ∈ B makes l_{alpha,0} degenerate");
  const FieldCtx& k = a.ctx();
  const FSet alphas = expander_set(a, a);
  std::vector<Line> all;
  all.reserve(alphas.size() * b.size());
  for (const Elem& alpha : alphas) {
    for (const Elem& beta : b) {
      Line l = line_through_slope(k.mul(alpha, beta), k.neg(beta));
      l.family = std::make_pair(alpha, beta);
      all.push_back(std::move(l));
    }
  }
  std::stable_sort(all.begin(), all.end());
  LineFamily fam;
  for (Line& l : all) {
    if (!fam.lines.empty() && fam.lines.back() == l) {
      fam.duplicates.push_back(*l.family);
    } else {
      fam.lines.push_back(std::move(l));
    }
  }
  return fam;
}

StLowerBoundResult st_lower_bound_check(const FSet& a, const FSet& b, u64 t) {
  require_rational(a);
  require_rational(b);
  const FSet st = rich_products(a, b, t);
  const FieldCtx& k = a.ctx();
  const LineFamily fam = expander_line_family(a, b);
  const LineIndex index(fam.lines);

  StLowerBoundResult r;
  r.s_t_size = st.size();
  r.line_count = fam.lines.size();
  std::vector<Point> witnesses;
  for (const Elem& s : st) {
    std::vector<std::pair<Elem, Elem>> sols;
    for (const Elem& ai : a) {
      const Elem bi = k.div(s, ai);
      if (b.contains(bi)) sols.emplace_back(ai, bi);
      if (sols.size() == t) break;
    }
    if (sols.size() < t) throw Error(ErrorCode::kWitnessFailure, "s = " + k.render(s) + " is not t-rich");
    for (const Elem& x : a) {
      const Point p{k.inv(x), s};
      std::vector<Line> through;
      for (const auto& [ai, bi] : sols) {
        const Elem alpha = k.mul(x, k.add(ai, k.one()));
        const Line l = line_through_slope(k.mul(alpha, bi), k.neg(bi));
        if (!index.has(l) || !l.contains(p)) {
          throw Error(ErrorCode::kWitnessFailure, "(1/" + k.render(x) + ", " + k.render(s) +
                                                      ") is not on " + l.render());
        }
        through.push_back(l);
      }
      std::sort(through.begin(), through.end());
      if (std::adjacent_find(through.begin(), through.end()) != through.end()) {
        throw Error(ErrorCode::kWitnessFailure, "witness lines through (1/" + k.render(x) + ", " +
                                                    k.render(s) + ") coincide");
      }
      witnesses.push_back(p);
    }
  }
  require_distinct(witnesses);
  r.witness_count = witnesses.size();

  if (t >= 2 && fam.lines.size() <= kExactRichLineCap) {
    r.p_t_exact = true;
    if (const auto keyed = integer_degrees(fam.lines, t)) {
      r.p_t_lower = keyed->size();
      for (const Point& w : witnesses) {
        const auto key = key_of(w);
        const auto it = key ? std::lower_bound(keyed->begin(), keyed->end(), std::make_pair(*key, u64{0}))
                            : keyed->end();
        if (it == keyed->end() || it->first != *key) {
          throw Error(ErrorCode::kWitnessFailure, "witness missing from P_t");
        }
      }
    } else {
      const auto degrees = intersection_degrees(fam.lines, t);
      r.p_t_lower = degrees.size();
      for (const Point& w : witnesses) {
        if (!degrees.count(w)) throw Error(ErrorCode::kWitnessFailure, "witness missing from P_t");
      }
    }
  } else {
    r.p_t_lower = r.witness_count;
  }

  r.report = exact_relation("R7", q(r.s_t_size) * q(a.size()), q(r.p_t_lower));
  if (!r.p_t_exact) {
    r.report.notes = t == 1 ? "P_1 is infinite; rhs counts the certified witnesses"
                            : "family too large for exact P_t; rhs counts the certified witnesses";
  }
  r.report.instance_digest = instance_digest({&a, &b}, "R7 t=" + std::to_string(t));
  return r;
}

nlohmann::ordered_json point_to_json(const Point& p) {
  return {{"x", rationals().render(p.x)}, {"y", rationals().render(p.y)}};
}

nlohmann::ordered_json line_to_json(const Line& l) {
  nlohmann::ordered_json j;
  j["vertical"] = l.vertical;
  if (!l.vertical) j["m"] = rationals().render(l.m);
  j["c"] = rationals().render(l.c);
  if (l.family) j["family"] = {{"alpha", rationals().render(l.family->first)},
                               {"b", rationals().render(l.family->second)}};
  return j;
}

}  // namespace expanderlab
