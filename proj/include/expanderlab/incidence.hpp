#ifndef EXPANDERLAB_INCIDENCE_HPP_
#define EXPANDERLAB_INCIDENCE_HPP_

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "expanderlab/fset.hpp"
#include "expanderlab/report.hpp"

namespace expanderlab {

// Incidence geometry works over Q only. Coordinates are rational Elems.
struct Point {
  Elem x;
  Elem y;
  friend auto operator<=>(const Point&, const Point&) = default;
  friend bool operator==(const Point&, const Point&) = default;
};

// y = m x + c, or x = c when vertical (m is then zero). The triple
// (vertical, m, c) is the canonical key.
struct Line {
  bool vertical = false;
  Elem m;
  Elem c;
  // Family provenance: l_{alpha,b} is y = (alpha x - 1) b.
  std::optional<std::pair<Elem, Elem>> family;

  bool contains(const Point& p) const;
  std::string render() const;

  friend bool operator==(const Line& a, const Line& b) {
    return a.vertical == b.vertical && a.m == b.m && a.c == b.c;
  }
  friend std::strong_ordering operator<=>(const Line& a, const Line& b) {
    if (auto o = a.vertical <=> b.vertical; o != 0) return o;
    if (auto o = a.m <=> b.m; o != 0) return o;
    return a.c <=> b.c;
  }
};

Line line_through_slope(const Elem& m, const Elem& c);
Line vertical_line(const Elem& c);
Point make_point(long x, long y);
Point make_point(const mpq_class& x, const mpq_class& y);

// Throws kDuplicateInput on repeated points or geometrically equal lines.
void require_distinct(const std::vector<Point>& points);
void require_distinct(const std::vector<Line>& lines);

// Exact I(P, L). Counts per point through line keys and per line through
// point membership; a mismatch throws kWitnessFailure.
std::uint64_t count_incidences(const std::vector<Point>& points, const std::vector<Line>& lines);

// Number of lines through p.
std::uint64_t incidences_at(const Point& p, const std::vector<Line>& lines);

// Pairwise intersection points of non-parallel lines, sorted and distinct.
std::vector<Point> intersection_points(const std::vector<Line>& lines);

struct RichPointsResult {
  std::vector<Point> points;  // P_k
  std::uint64_t k = 0;
  bool from_intersections = false;
  mpq_class shape;  // |L|^2/k^3 + |L|/k
  mpq_class slack;  // |P_k| / shape
};

// P_k among the given points, or among the intersection points of L when
// points is nullopt (for k = 1 this still only lists intersection points).
// Throws kTOutOfRange for k = 0.
RichPointsResult rich_points(const std::optional<std::vector<Point>>& points,
                             const std::vector<Line>& lines, std::uint64_t k);

// I(P, L) / (|P|^{2/3}|L|^{2/3} + |P| + |L|), exact when |P||L| is a cube.
Quantity st_slack(std::uint64_t incidences, std::uint64_t points, std::uint64_t lines,
                  long precision_bits = kDefaultStartPrecision);

struct LineFamily {
  std::vector<Line> lines;  // distinct, canonical order
  // (alpha, b) pairs whose line coincided with an earlier one.
  std::vector<std::pair<Elem, Elem>> duplicates;
};

// {l_{alpha,b} : alpha ∈ A(A+1), b ∈ B}. Throws kFieldMismatch outside Q and
// kZeroElementPresent when 0 ∈ B.
LineFamily expander_line_family(const FSet& a, const FSet& b);

struct StLowerBoundResult {
  std::uint64_t s_t_size = 0;
  std::uint64_t witness_count = 0;
  // |P_t| counted exactly over intersection points when t >= 2 and the
  // family is small enough; otherwise the witness count.
  std::uint64_t p_t_lower = 0;
  bool p_t_exact = false;
  std::uint64_t line_count = 0;
  InequalityReport report;
};

inline constexpr std::size_t kExactRichLineCap = 1500;

// Builds the witnesses (1/a, s) for (s, a) ∈ S_t(A,B) × A and checks each lies
// on t pairwise distinct family lines. Throws kWitnessFailure,
// kTOutOfRange, kFieldMismatch, kZeroElementPresent.
StLowerBoundResult st_lower_bound_check(const FSet& a, const FSet& b, std::uint64_t t);

nlohmann::ordered_json point_to_json(const Point& p);
nlohmann::ordered_json line_to_json(const Line& l);

}  // namespace expanderlab

#endif  // EXPANDERLAB_INCIDENCE_HPP_
