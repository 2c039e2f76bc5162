#include "expanderlab/verify.hpp"

#include <algorithm>
#include <functional>

#include "expanderlab/constructions.hpp"
#include "expanderlab/energy.hpp"
#include "expanderlab/incidence.hpp"
#include "expanderlab/set_arith.hpp"

namespace expanderlab {

namespace {

using u64 = std::uint64_t;

mpq_class q(u64 v) { return mpq_class(mpz_class(static_cast<unsigned long>(v))); }
mpz_class z(u64 v) { return mpz_class(static_cast<unsigned long>(v)); }

mpz_class zpow(u64 base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

[[noreturn]] void side_condition(std::string_view key, const std::string& what) {
  throw Error(ErrorCode::kSideConditionViolated, std::string(key) + ": " + what);
}

void forbid(std::string_view key, const FSet& s, std::string_view set_name,
            std::initializer_list<long> values) {
  for (long v : values) {
    if (s.contains(s.ctx().from_int(v))) {
      side_condition(key, std::to_string(v) + " ∈ " + std::string(set_name));
    }
  }
}

void require_nonempty(std::string_view key, const FSet& s, std::string_view set_name) {
  if (s.empty()) side_condition(key, std::string(set_name) + " is empty");
}

void require_rational(std::string_view key, const FSet& s) {
  if (!s.ctx().is_rational()) side_condition(key, "needs the rational context");
}

// x^(num/den) as an exact rational when it is one, else an enclosure.
Quantity root_power(const mpz_class& x, unsigned long num, unsigned long den, long prec) {
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), den) != 0) {
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), r.get_mpz_t(), num);
    return mpq_class(p);
  }
  return Interval::power(x, num, den, prec);
}

u64 ratio_energy_pairs_check(const FSet& a, const FSet& b) {
  u64 total = 0;
  for (const Elem& x : combine(a, b, SetOp::kRatio)) total += ratio_multiplicity(a, b, x);
  return total;
}

std::uint64_t effective_t(const CheckOptions& o, const FSet& a, const FSet& b) {
  if (o.t != 0) return o.t;
  return std::min<u64>({2, a.size(), b.size()});
}

Quantity e15_product(const FSet& a, const CheckOptions& o) {
  EnergyOptions eo{o.start_precision, o.precision_cap, 64};
  const FSet a1 = shift_by_one(a);
  const EnergyValue x = energy(histogram(a, a, HistogramKind::kRatio), mpq_class(3, 2), eo);
  const EnergyValue y = energy(histogram(a1, a1, HistogramKind::kRatio), mpq_class(3, 2), eo);
  return x.enclosure * y.enclosure;
}

InequalityReport run(std::string_view key, const FSet& a, const FSet& b, const FSet& c,
                     const CheckOptions& o) {
  const long prec = o.start_precision;
  require_nonempty(key, a, "A");

  if (key == "R1") {
    require_nonempty(key, c, "C");
    const u64 ab = combine(a, b, SetOp::kDiff).size();
    const u64 ac = combine(a, c, SetOp::kDiff).size();
    const u64 bc = combine(b, c, SetOp::kDiff).size();
    return exact_relation("R1", q(ab), q(ac) * q(bc) / q(c.size()));
  }
  if (key == "R2") {
    forbid(key, a, "A", {0, -1});
    const u64 ratio = combine(a, a, SetOp::kRatio).size();
    const u64 e = expander_set(a, a).size();
    return exact_relation("R2", q(ratio), q(e) * q(e) / q(a.size()));
  }
  if (key == "R3") {
    forbid(key, a, "A", {-1, 0, 1});
    const u64 e = expander_set(a, a).size();
    const mpz_class e2 = energy2(histogram(a, shift_by_one(a), HistogramKind::kRatio));
    return exact_relation("R3", mpq_class(zpow(a.size(), 4)) / q(e), mpq_class(e2));
  }
  if (key == "R4") {
    forbid(key, a, "A", {-1, 0, 1});
    const FSet a1 = shift_by_one(a);
    const mpz_class mixed = energy2(histogram(a, a1, HistogramKind::kRatio));
    const mpz_class prod =
        energy2(histogram(a, a, HistogramKind::kRatio)) * energy2(histogram(a1, a1, HistogramKind::kRatio));
    InequalityReport r;
    r.name = "R4";
    r.lhs = mpq_class(mixed);
    r.rhs = root_power(prod, 1, 2, prec);
    r.verdict = mixed * mixed <= prod ? Verdict::kHolds : Verdict::kFails;
    r.slack = ratio(r.lhs, r.rhs, prec);
    r.notes = "decided as E2(A,A+1)^2 <= E2(A) E2(A+1)";
    return r;
  }
  if (key == "R5") {
    require_rational(key, a);
    forbid(key, a, "A", {-1, 0, 1});
    forbid(key, b, "B", {0});
    InequalityReport r = li_lemma(a, b, o);
    return r;
  }
  if (key == "R6") {
    forbid(key, a, "A", {0});
    forbid(key, b, "B", {0});
    return exact_relation("R6", q(ratio_energy_pairs_check(a, b)), q(a.size()) * q(b.size()), true);
  }
  if (key == "R7") {
    require_rational(key, a);
    require_rational(key, b);
    forbid(key, a, "A", {0});
    forbid(key, b, "B", {0});
    require_nonempty(key, b, "B");
    return st_lower_bound_check(a, b, effective_t(o, a, b)).report;
  }
  if (key == "R8") {
    forbid(key, a, "A", {0});
    forbid(key, b, "B", {0});
    require_nonempty(key, b, "B");
    if (sgn(o.epsilon) <= 0 || o.epsilon >= 1) side_condition(key, "needs 0 < epsilon < 1");
    const PopularRatioResult pr = popular_ratio_graph(a, b, o.epsilon);
    InequalityReport r = slack_only("R8", q(pr.partial_diff.size()), pr.bound_rhs_shape);
    r.notes = "|G| = " + std::to_string(pr.graph.edge_count()) + ", eps = " + render_rational(o.epsilon);
    return r;
  }
  if (key == "R9") {
    forbid(key, a, "A", {0});
    forbid(key, b, "B", {0});
    require_nonempty(key, b, "B");
    const u64 t = effective_t(o, a, b);
    const FSet st = rich_products(a, b, t);
    const u64 e = expander_set(a, a).size();
    const mpq_class rhs = q(e) * q(e) * q(b.size()) * q(b.size()) / (q(a.size()) * q(t) * q(t) * q(t));
    InequalityReport r = slack_only("R9", q(st.size()), rhs);
    r.notes = "t = " + std::to_string(t);
    return r;
  }
  if (key == "R10a" || key == "R10b") {
    forbid(key, a, "A", {-1, 0, 1});
    const FSet s = key == "R10a" ? a : shift_by_one(a);
    const u64 e = expander_set(a, a).size();
    const mpz_class e3 = energy_integer(histogram(s, s, HistogramKind::kRatio), 3);
    return slack_only(std::string(key), mpq_class(e3), q(e) * q(e) * q(a.size()));
  }
  if (key == "R10c" || key == "R10d") {
    forbid(key, a, "A", {-1, 0, 1});
    const FSet s = key == "R10c" ? a : shift_by_one(a);
    const FSet e = expander_set(a, a);
    const mpz_class e2 = energy2(histogram(s, e, HistogramKind::kRatio));
    return slack_only(std::string(key), mpq_class(e2), root_power(z(e.size()), 5, 2, prec));
  }
  if (key == "R11a") {
    forbid(key, a, "A", {-1, 0, 1});
    const u64 e = expander_set(a, a).size();
    const mpq_class lhs = mpq_class(zpow(a.size(), 11)) / mpq_class(zpow(e, 5));
    return slack_only("R11a", lhs, e15_product(a, o));
  }
  if (key == "R11b" || key == "R11c") {
    if (key == "R11b") forbid(key, a, "A", {-1, 0, 1});
    const u64 e = expander_set(a, a).size();
    const bool real = key == "R11b";
    return slack_only(std::string(key), mpq_class(zpow(a.size(), real ? 24 : 57)),
                      mpq_class(zpow(e, real ? 19 : 56)));
  }
  throw Error(ErrorCode::kUnknownRelation, std::string(key));
}

}  // namespace

const std::vector<RelationInfo>& registry() {
  static const std::vector<RelationInfo> reg = {
      {"R1", "|A-B| <= |A-C||B-C|/|C|", true, 3},
      {"R2", "|A/A| <= |A(A+1)|^2/|A|", true, 1},
      {"R3", "|A|^4/|A(A+1)| <= E2(A,A+1)", true, 1},
      {"R4", "E2(A,A+1) <= E2(A)^(1/2) E2(A+1)^(1/2)", true, 1},
      {"R5", "E1.5(A)^2|B|^2 <= E2(A,AB) E3(A)^(2/3) E3(B)^(1/3)", true, 2},
      {"R6", "sum over x in A/B of |A ∩ xB| = |A||B|", true, 2},
      {"R7", "|P_t| >= |S_t(A,B)||A|", true, 2},
      {"R8", "|A -G B| << |A(B+1)||B(A+1)||A/B|/(|A||B|)", false, 2},
      {"R9", "|S_t(A,B)| << |A(A+1)|^2|B|^2/(|A|t^3)", false, 2},
      {"R10a", "E3(A) <~ |A(A+1)|^2|A|", false, 1},
      {"R10b", "E3(A+1) <~ |A(A+1)|^2|A|", false, 1},
      {"R10c", "E2(A,A(A+1)) << |A(A+1)|^(5/2)", false, 1},
      {"R10d", "E2(A+1,A(A+1)) << |A(A+1)|^(5/2)", false, 1},
      {"R11a", "|A|^11/|A(A+1)|^5 << E1.5(A) E1.5(A+1)", false, 1},
      {"R11b", "|A|^24 << |A(A+1)|^19", false, 1},
      {"R11c", "|A|^57 <~ |A(A+1)|^56", false, 1},
  };
  return reg;
}

const RelationInfo& relation_info(std::string_view key) {
  for (const auto& r : registry()) {
    if (r.key == key) return r;
  }
  throw Error(ErrorCode::kUnknownRelation, std::string(key));
}

InequalityReport check(std::string_view name, std::span<const FSet> inputs, const CheckOptions& options) {
  const RelationInfo& info = relation_info(name);
  if (inputs.empty()) side_condition(name, "no input set");
  const FSet& a = inputs[0];
  const FSet& b = inputs.size() > 1 ? inputs[1] : a;
  const FSet& c = inputs.size() > 2 ? inputs[2] : b;
  require_same_ctx(a, b);
  require_same_ctx(b, c);
  InequalityReport r = run(info.key, a, b, c, options);
  std::vector<const FSet*> sets{&a};
  if (info.arity >= 2) sets.push_back(&b);
  if (info.arity >= 3) sets.push_back(&c);
  std::string params = info.key;
  if (info.key == "R8") params += " eps=" + render_rational(options.epsilon);
  if (info.key == "R7" || info.key == "R9") params += " t=" + std::to_string(effective_t(options, a, b));
  r.instance_digest = instance_digest(sets, params);
  return r;
}

InequalityReport li_lemma(const FSet& a, const FSet& b, const CheckOptions& o) {
  require_same_ctx(a, b);
  if (a.contains_zero() || b.contains_zero()) {
    throw Error(ErrorCode::kZeroElementPresent, "Li's lemma needs 0 ∉ A, B");
  }
  const MultiplicityHistogram ha = histogram(a, a, HistogramKind::kRatio);
  const MultiplicityHistogram hb = histogram(b, b, HistogramKind::kRatio);
  const mpz_class e2 = energy2(histogram(a, combine(a, b, SetOp::kProd), HistogramKind::kRatio));
  const mpz_class e3a = energy_integer(ha, 3);
  const mpz_class e3b = energy_integer(hb, 3);
  const mpz_class e3_part = e3a * e3a * e3b;  // (E3(A)^{2/3} E3(B)^{1/3})^3
  const mpz_class rhs_cube = e2 * e2 * e2 * e3_part;
  const mpz_class b2 = zpow(b.size(), 2);
  const mpz_class b6 = b2 * b2 * b2;

  InequalityReport r;
  r.name = "R5";
  const long prec = o.start_precision;
  const Quantity cube_root = root_power(e3_part, 1, 3, prec);
  r.rhs = multiply(mpq_class(e2), cube_root, prec);

  EnergyOptions eo{o.start_precision, o.precision_cap, 64};
  const EnergyValue e15 = energy(ha, mpq_class(3, 2), eo);
  if (e15.surd.size() == 1) {
    // E1.5^2 = Q^2 k is an integer.
    const auto& [k, coeff] = *e15.surd.begin();
    const mpz_class sq = coeff * coeff * k;
    r.lhs = mpq_class(sq * b2);
    r.verdict = sq * sq * sq * b6 <= rhs_cube ? Verdict::kHolds : Verdict::kFails;
    r.notes = "decided exactly on cubes";
  } else {
    // Two or more surd kernels: E1.5^6 is irrational, so refinement terminates.
    r.verdict = Verdict::kInconclusive;
    Interval lhs6;
    for (long p = o.start_precision; p <= o.precision_cap; p *= 2) {
      const Interval e = energy_at_precision(ha, mpq_class(3, 2), p);
      lhs6 = e.pow(6) * Interval::from_mpz(b6, p);
      r.lhs = e.pow(2) * Interval::from_mpz(b2, p);
      if (lhs6.certainly_le(mpq_class(rhs_cube))) {
        r.verdict = Verdict::kHolds;
      } else if (lhs6.certainly_gt(mpq_class(rhs_cube))) {
        r.verdict = Verdict::kFails;
      }
      if (r.verdict != Verdict::kInconclusive) {
        r.notes = "decided on cubes at " + std::to_string(p) + " bits";
        break;
      }
    }
    if (r.verdict == Verdict::kInconclusive) {
      r.notes = "cube comparison undecided at " + std::to_string(o.precision_cap) + " bits";
    }
  }
  r.slack = ratio(r.lhs, r.rhs, prec);
  return r;
}

std::string_view branch_name(PipelineBranch b) {
  switch (b) {
    case PipelineBranch::kRneqFp: return "RneqFp";
    case PipelineBranch::kReqFp: return "ReqFp";
    case PipelineBranch::kDegenerate: return "Degenerate";
    case PipelineBranch::kReal: return "Real";
  }
  return "?";
}

bool any_verdict(std::span<const InequalityReport> reports, Verdict v) {
  return std::any_of(reports.begin(), reports.end(), [&](const auto& r) { return r.verdict == v; });
}

namespace {

class TraceBuilder {
 public:
  TraceBuilder(PipelineTrace& trace, const FSet& a) : trace_(trace), a_(a) {}

  void add(std::string description, InequalityReport r) {
    if (r.instance_digest.empty()) {
      r.instance_digest = instance_digest({&a_}, trace_.mode + " " + r.name);
    }
    trace_.steps.push_back({std::move(description), std::move(r)});
  }

  // An equality between a count and the number of items passing a check.
  void tally(std::string name, std::string description, u64 total, u64 passing) {
    InequalityReport r = exact_relation(std::move(name), q(passing), q(total), true);
    add(std::move(description), std::move(r));
  }

 private:
  PipelineTrace& trace_;
  const FSet& a_;
};

struct CoverOutcome {
  FSet subset;  // A_v ⊆ A_1
  std::size_t translates = 0;
};

// Covers v(A_1+1) by translates of ±(v(A+1) ∩ b0(A+1)) through the partial
// difference graph of the normalised sets, then reads off A_v.
CoverOutcome cover_step(TraceBuilder& tb, const FSet& a, const FSet& a1, const Elem& b0,
                        const Elem& v, CoverSign sign, const mpq_class& eps,
                        const mpq_class& translate_shape, const std::string& label) {
  const FieldCtx& ctx = a.ctx();
  const FSet a_set = affine_image(a1, v, v);
  const FSet b_set = affine_image(a, v, v).intersect(affine_image(a, b0, b0));
  // (x - v)/v maps both sets back inside A.
  const Elem vinv = ctx.inv(v);
  const FSet b_norm = affine_image(b_set, vinv, ctx.neg(ctx.one()));
  const mpq_class inner = eps * eps / 4;
  const PopularRatioResult pr = popular_ratio_graph(a1, b_norm, inner);

  std::vector<PairGraph::Edge> edges;
  for (const auto& [i, j] : pr.graph.edges()) {
    const Elem x = ctx.mul(v, ctx.add(a1[i], ctx.one()));
    const Elem y = ctx.mul(v, ctx.add(b_norm[j], ctx.one()));
    edges.emplace_back(static_cast<std::uint32_t>(*a_set.index_of(x)),
                       static_cast<std::uint32_t>(*b_set.index_of(y)));
  }
  const PairGraph g(a_set, b_set, std::move(edges));
  const CoverResult cover = greedy_cover(a_set, b_set, g, inner, sign);

  std::vector<Elem> sub;
  for (const Elem& x : a1) {
    if (cover.covered.contains(ctx.mul(v, ctx.add(x, ctx.one())))) sub.push_back(x);
  }
  CoverOutcome out{FSet(ctx, std::move(sub)), cover.translates.size()};

  // v·a lies in a translate of ±b0·A: v(a+1) ∈ t ± b0(A+1).
  const FSet b0a = dilate(a, b0);
  u64 contained = 0;
  for (const Elem& x : out.subset) {
    const Elem va = ctx.mul(v, x);
    const bool ok = std::any_of(cover.translates.begin(), cover.translates.end(), [&](const Elem& t) {
      if (sign == CoverSign::kPlus) return b0a.contains(ctx.sub(va, ctx.sub(ctx.add(t, b0), v)));
      return b0a.contains(ctx.neg(ctx.sub(va, ctx.sub(ctx.sub(t, b0), v))));
    });
    if (ok) ++contained;
  }

  const u64 steps_ok = std::count_if(cover.steps.begin(), cover.steps.end(),
                                     [](const CoverStep& s) { return s.guarantee_holds; });
  tb.tally("cover_" + label + "_discard", "greedy discard bound on every iteration for " + label,
           cover.steps.size(), steps_ok);
  tb.tally("cover_" + label + "_contained",
           label + "·A_" + label + " inside the translates of " + (sign == CoverSign::kPlus ? "" : "-") + "b0·A",
           out.subset.size(), contained);
  tb.add("|A_" + label + "| >= (1-eps)|A_1|",
         exact_relation("cover_" + label + "_size", (1 - eps) * q(a1.size()), q(out.subset.size())));
  tb.add("translate count for " + label + " against |A(A+1)|^2|A/A|/(N^2|A_1|)",
         slack_only("cover_" + label + "_translates", q(out.translates), translate_shape));
  return out;
}

FSet combo_sum(const FSet& s, const Quadruple& qd) {
  FSet r = combine(dilate(s, qd.alpha), dilate(s, qd.beta), SetOp::kDiff);
  r = combine(r, dilate(s, qd.gamma), SetOp::kDiff);
  return combine(r, dilate(s, qd.delta), SetOp::kSum);
}

}  // namespace

PipelineTrace finite_field_pipeline(const FSet& a, const mpq_class& epsilon) {
  const FieldCtx& ctx = a.ctx();
  if (!ctx.is_prime_field()) throw Error(ErrorCode::kFieldMismatch, "the finite field pipeline needs F_p");
  if (a.size() < 3) throw Error(ErrorCode::kSetTooSmall, "the pipeline needs |A| >= 3");
  forbid("pipeline", a, "A", {0, -1});
  if (mpz_class(z(a.size()) * z(a.size())) >= ctx.modulus()) {
    throw Error(ErrorCode::kDensityViolated, "needs |A|^2 < p");
  }
  if (sgn(epsilon) <= 0 || epsilon >= mpq_class(1, 16)) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "pipeline epsilon must lie in (0, 1/16)");
  }

  PipelineTrace trace;
  trace.mode = "fp";
  TraceBuilder tb(trace, a);
  const u64 n = a.size();
  const FSet expander = expander_set(a, a);
  const u64 e = expander.size();
  const FSet diff = combine(a, a, SetOp::kDiff);
  const u64 ratio_size = combine(a, a, SetOp::kRatio).size();

  CheckOptions co;
  co.epsilon = epsilon;
  const FSet one_set[] = {a};
  tb.add("ratio set via the multiplicative Ruzsa triangle", check("R2", one_set, co));
  tb.add("partial difference bound for G from the popular ratios", check("R8", one_set, co));
  tb.add("|A-A| against |A(A+1)|^8/|A|^7",
         slack_only("finite1", q(diff.size()), mpq_class(zpow(e, 8)) / mpq_class(zpow(n, 7))));
  const std::vector<int> four{1, -1, 1, -1};
  const u64 diff4 = kfold_sum(a, four).size();
  tb.add("|A-A-A-A| against |A-A|^3/|A|^2",
         slack_only("finite2", q(diff4), mpq_class(zpow(diff.size(), 3)) / mpq_class(zpow(n, 2))));

  // counts[b][a] = |a(A+1) ∩ b(A+1)|
  std::vector<FSet> dilates;
  for (const Elem& x : a) dilates.push_back(affine_image(a, x, x));
  std::vector<std::vector<u64>> counts(n, std::vector<u64>(n));
  u64 total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      counts[i][j] = dilates[i].intersection_size(dilates[j]);
      total += counts[i][j];
    }
  }
  tb.add("Cauchy-Schwarz on the pair intersections",
         exact_relation("cs_pairs", mpq_class(zpow(n, 4)) / q(e), q(total)));

  std::size_t b0i = 0;
  u64 best_row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    u64 row = 0;
    for (std::size_t j = 0; j < n; ++j) row += counts[i][j];
    if (row > best_row) {
      best_row = row;
      b0i = i;
    }
  }
  const Elem b0 = a[b0i];
  trace.b0 = b0;
  tb.add("b0 maximises the row sum", exact_relation("b0_row", mpq_class(zpow(n, 3)) / q(e), q(best_row)));
  for (std::size_t j = 0; j < n; ++j) trace.intersection_counts.emplace_back(a[j], counts[b0i][j]);

  // Dyadic classes [2^j, 2^{j+1}) for j = 0..floor(log2 |A|).
  std::size_t classes = 0;
  while ((u64{1} << classes) <= n) ++classes;
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 c = counts[b0i][j];
    if (c == 0) continue;
    std::size_t k = 0;
    while ((u64{2} << k) <= c) ++k;
    members[k].push_back(j);
  }
  std::size_t best_class = 0;
  u64 best_mass = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    const u64 mass = (u64{1} << k) * members[k].size();
    if (mass > best_mass) {
      best_mass = mass;
      best_class = k;
    }
  }
  const u64 big_n = u64{1} << best_class;
  const FSet a1 = a.select(members[best_class]);
  trace.n = big_n;
  trace.a1 = a1;
  u64 in_class = 0;
  for (std::size_t j : members[best_class]) {
    if (counts[b0i][j] >= big_n && counts[b0i][j] < 2 * big_n) ++in_class;
  }
  tb.tally("dyadic_membership", "|a(A+1) ∩ b0(A+1)| ∈ [N, 2N) on A_1", a1.size(), in_class);
  tb.add("N|A_1| against |A|^3/(|A(A+1)| · 2 · #classes)",
         exact_relation("dyadic_mass", mpq_class(zpow(n, 3)) / (q(e) * 2 * q(classes)),
                        q(big_n) * q(a1.size())));
  tb.add("N against |A|^2/|A(A+1)|", slack_only("finite4", mpq_class(zpow(n, 2)) / q(e), q(big_n)));

  const InequalityReport final_report = check("R11c", one_set, co);
  if (a1.size() < 2) {
    trace.branch = PipelineBranch::kDegenerate;
    tb.add("final exponent comparison", final_report);
    return trace;
  }

  const FSet d1 = combine(a1, a1, SetOp::kDiff);
  const FSet d1_nonzero = d1.minus(FSet::from_ints(ctx, {0}));
  const FSet r_set = combine(d1, d1_nonzero, SetOp::kRatio);
  trace.r_a1_size = r_set.size();
  trace.r_a1_full = mpz_class(z(r_set.size())) == ctx.modulus();
  trace.branch = *trace.r_a1_full ? PipelineBranch::kReqFp : PipelineBranch::kRneqFp;

  Elem xi;
  if (trace.branch == PipelineBranch::kRneqFp) {
    const Elem one = ctx.one();
    for (const Elem& x : r_set) {
      if (!r_set.contains(ctx.sub(x, one))) {
        xi = x;
        break;
      }
    }
  } else {
    std::optional<mpz_class> best;
    for (const Elem& x : r_set) {
      if (x.is_zero()) continue;
      const mpz_class en = twisted_energy(a1, x);
      if (!best || en < *best) {
        best = en;
        xi = x;
      }
    }
  }
  trace.xi = xi;

  // Lexicographically smallest (α, β, γ, δ) with α - β = ξ(γ - δ), γ ≠ δ.
  for (const Elem& al : a1) {
    for (const Elem& be : a1) {
      for (const Elem& ga : a1) {
        for (const Elem& de : a1) {
          if (trace.quadruple) break;
          if (ga == de) continue;
          if (ctx.sub(al, be) == ctx.mul(xi, ctx.sub(ga, de))) trace.quadruple = Quadruple{al, be, ga, de};
        }
      }
    }
  }
  const Quadruple qd = *trace.quadruple;
  const u64 m1 = a1.size();

  if (trace.branch == PipelineBranch::kRneqFp) {
    const Elem xim1 = ctx.sub(xi, ctx.one());
    const u64 sums = combine(a1, dilate(a1, xim1), SetOp::kSum).size();
    tb.add("A_1 + (ξ-1)A_1 has no repetitions",
           exact_relation("no_repetition", q(sums), q(m1) * q(m1), true));
  } else {
    mpz_class sum = zpow(m1, 3);  // ξ = 0 contributes |A_1|^3 solutions
    for (const Elem& x : r_set) {
      if (!x.is_zero()) sum += twisted_energy(a1, x);
    }
    tb.add("Σ_ξ E(A_1, ξA_1) <= |A_1|^4 + p|A_1|^2",
           exact_relation("twisted_sum", mpq_class(sum),
                          mpq_class(zpow(m1, 4) + ctx.modulus() * zpow(m1, 2))));
    tb.add("E(A_1, ξA_1) against |A_1|^2",
           slack_only("twisted_min", mpq_class(twisted_energy(a1, xi)), mpq_class(zpow(m1, 2))));
  }

  const mpq_class shape = q(e) * q(e) * q(ratio_size) / (q(big_n) * q(big_n) * q(m1));
  const CoverOutcome ca = cover_step(tb, a, a1, b0, qd.alpha, CoverSign::kPlus, epsilon, shape, "alpha");
  const CoverOutcome cb = cover_step(tb, a, a1, b0, qd.beta, CoverSign::kPlus, epsilon, shape, "beta");
  const CoverOutcome cg = cover_step(tb, a, a1, b0, qd.gamma, CoverSign::kPlus, epsilon, shape, "gamma");
  const CoverOutcome cd = cover_step(tb, a, a1, b0, qd.delta, CoverSign::kMinus, epsilon, shape, "delta");
  const FSet a2 = ca.subset.intersect(cb.subset).intersect(cg.subset).intersect(cd.subset);
  tb.add("|A_2| >= (1-4eps)|A_1|", exact_relation("a2_size", (1 - 4 * epsilon) * q(m1), q(a2.size())));

  const Elem gd = ctx.sub(qd.gamma, qd.delta);
  const Elem ab = ctx.sub(qd.alpha, qd.beta);
  if (trace.branch == PipelineBranch::kRneqFp) {
    FSet a3 = a2;
    if (a2.size() <= kDefaultPlunneckeBudget) {
      const FSet base = dilate(a2, gd);
      const std::vector<FSet> xs{dilate(a2, ab), negate(dilate(a2, gd))};
      const PlunneckeResult pw = plunnecke_witness(base, xs);
      a3 = dilate(pw.best_subset, ctx.inv(gd));
      tb.add("Plünnecke subset A_3 of A_2", pw.report);
    }
    const FSet lhs_set = combine(combine(dilate(a3, gd), dilate(a3, ab), SetOp::kSum), dilate(a3, gd),
                                 SetOp::kDiff);
    tb.add("|A_3|^2 <= |(γ-δ)A_3 + (α-β)A_3 - (γ-δ)A_3|",
           exact_relation("finite7", q(a3.size()) * q(a3.size()), q(lhs_set.size())));
    tb.add("|A_1|^2 against |A-A||αA_2-βA_2-γA_2+δA_2|/|A_1|",
           slack_only("finite_chain", q(m1) * q(m1),
                      q(diff.size()) * q(combo_sum(a2, qd).size()) / q(m1)));
  } else {
    const u64 twist = combine(a2, dilate(a2, xi), SetOp::kDiff).size();
    const mpz_class en = twisted_energy(a2, xi);
    tb.add("E(A*, ξA*)|A* - ξA*| >= |A*|^4",
           exact_relation("cs_twisted", mpq_class(zpow(a2.size(), 4)), mpq_class(en * z(twist))));
    tb.add("|A* - ξA*| <= |αA* - βA* - γA* + δA*|",
           exact_relation("quad_sum_lower", q(twist), q(combo_sum(a2, qd).size())));
  }
  tb.add("final exponent comparison", final_report);
  return trace;
}

PipelineTrace real_pipeline(const FSet& a, const CheckOptions& options) {
  if (!a.ctx().is_rational()) throw Error(ErrorCode::kFieldMismatch, "the real pipeline needs Q");
  if (a.empty()) throw Error(ErrorCode::kSetTooSmall, "A is empty");
  forbid("real_pipeline", a, "A", {-1, 0, 1});
  PipelineTrace trace;
  trace.mode = "real";
  TraceBuilder tb(trace, a);
  const FSet a1 = shift_by_one(a);
  const FSet one_set[] = {a};

  tb.add("Cauchy-Schwarz lower bound for E2(A,A+1)", check("R3", one_set, options));
  tb.add("Cauchy-Schwarz splitting of E2(A,A+1)", check("R4", one_set, options));
  InequalityReport li1 = li_lemma(a, a1, options);
  li1.instance_digest = instance_digest({&a, &a1}, "R5");
  tb.add("Li's lemma for (A, A+1)", std::move(li1));
  InequalityReport li2 = li_lemma(a1, a, options);
  li2.instance_digest = instance_digest({&a1, &a}, "R5");
  tb.add("Li's lemma for (A+1, A)", std::move(li2));
  tb.add("E1.5 product lower bound", check("R11a", one_set, options));
  const FSet pair[] = {a, a};
  tb.add("t-rich products of (A, A)", check("R9", pair, options));
  tb.add("E3(A) bound", check("R10a", one_set, options));
  tb.add("E3(A+1) bound", check("R10b", one_set, options));
  tb.add("E2(A, A(A+1)) bound", check("R10c", one_set, options));
  tb.add("E2(A+1, A(A+1)) bound", check("R10d", one_set, options));
  tb.add("final comparison |A|^24 against |A(A+1)|^19", check("R11b", one_set, options));
  return trace;
}

nlohmann::ordered_json trace_to_json(const PipelineTrace& t) {
  nlohmann::ordered_json j;
  j["mode"] = t.mode;
  j["branch"] = std::string(branch_name(t.branch));
  if (t.mode == "fp") {
    const FieldCtx& ctx = t.a1->ctx();
    j["b0"] = ctx.render(*t.b0);
    j["A1"] = t.a1->render();
    j["N"] = t.n;
    j["R_A1_full"] = t.r_a1_full ? nlohmann::ordered_json(*t.r_a1_full) : nlohmann::ordered_json();
    j["R_A1_size"] = t.r_a1_size;
    j["xi"] = t.xi ? nlohmann::ordered_json(ctx.render(*t.xi)) : nlohmann::ordered_json();
    if (t.quadruple) {
      j["quadruple"] = {ctx.render(t.quadruple->alpha), ctx.render(t.quadruple->beta),
                        ctx.render(t.quadruple->gamma), ctx.render(t.quadruple->delta)};
    } else {
      j["quadruple"] = nullptr;
    }
    auto counts = nlohmann::ordered_json::array();
    for (const auto& [x, c] : t.intersection_counts) counts.push_back({ctx.render(x), c});
    j["intersection_counts"] = std::move(counts);
  }
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : t.steps) {
    nlohmann::ordered_json step;
    step["description"] = s.description;
    step["report"] = report_to_json(s.report);
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  return j;
}

}  // namespace expanderlab
