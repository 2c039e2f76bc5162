#include "expanderlab/constructions.hpp"

#include <algorithm>
#include <bit>
#include <tuple>

#include "expanderlab/energy.hpp"
#include "expanderlab/set_arith.hpp"

namespace expanderlab {

namespace {

using u64 = std::uint64_t;

mpq_class q(u64 v) { return mpq_class(mpz_class(static_cast<unsigned long>(v))); }

void require_epsilon(const mpq_class& eps, const mpq_class& hi, bool allow_zero) {
  const bool lo_ok = allow_zero ? sgn(eps) >= 0 : sgn(eps) > 0;
  if (!lo_ok || eps >= hi) {
    throw Error(ErrorCode::kEpsilonOutOfRange,
                "epsilon " + render_rational(eps) + " outside " + (allow_zero ? "[0, " : "(0, ") +
                    render_rational(hi) + ")");
  }
}

void require_dense(const PairGraph& g, const mpq_class& eps) {
  const mpq_class need = (1 - eps) * q(g.left().size()) * q(g.right().size());
  if (q(g.edge_count()) < need) {
    throw Error(ErrorCode::kGraphTooSparse, "|G| = " + std::to_string(g.edge_count()) +
                                                " is below (1-eps)|A||B| = " + render_rational(need));
  }
}

// deg >= (1 - sqrt eps)·n, for deg <= n.
bool degree_dense(u64 deg, u64 n, const mpq_class& eps) {
  const mpq_class gap = q(n - deg);
  return gap * gap <= eps * q(n) * q(n);
}

}  // namespace

PopularRatioResult popular_ratio_graph(const FSet& a, const FSet& b, const mpq_class& epsilon) {
  require_same_ctx(a, b);
  if (a.contains_zero() || b.contains_zero()) {
    throw Error(ErrorCode::kZeroElementPresent, "popular ratios need 0 outside A and B");
  }
  require_epsilon(epsilon, 1, false);

  const auto ratios = multiplicities(a, b, HistogramKind::kRatio);
  const mpq_class ab = q(a.size()) * q(b.size());
  const mpq_class threshold = epsilon * ab / q(ratios.size());

  std::vector<Elem> popular;
  u64 popular_mass = 0;
  for (const auto& [x, m] : ratios) {
    if (q(m) >= threshold) {
      popular.push_back(x);
      popular_mass += m;
    }
  }
  PopularRatioResult r{FSet(a.ctx(), popular), PairGraph::empty(a, b), epsilon, FSet(a.ctx()),
                       0, 0, 0, 0, 0};
  r.ratio_set_size = ratios.size();

  const FieldCtx& ctx = a.ctx();
  std::vector<PairGraph::Edge> edges;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (r.popular.contains(ctx.div(a[i], b[j]))) {
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
  }
  r.graph = PairGraph(a, b, std::move(edges));

  if (r.graph.edge_count() != popular_mass) {
    throw Error(ErrorCode::kWitnessFailure, "|G| differs from the popular ratio mass");
  }
  if (q(r.graph.edge_count()) < (1 - epsilon) * ab) {
    throw Error(ErrorCode::kWitnessFailure, "|G| < (1-eps)|A||B|");
  }

  r.partial_diff = partial_combine(r.graph, SetOp::kDiff);
  r.expander_ab_size = expander_set(a, b).size();
  r.expander_ba_size = expander_set(b, a).size();
  r.bound_rhs_shape = q(r.expander_ab_size) * q(r.expander_ba_size) * q(r.ratio_set_size) / ab;
  r.slack = q(r.partial_diff.size()) / r.bound_rhs_shape;
  return r;
}

InjectionCertificate injection_witness(const FSet& a, const FSet& b, const PairGraph& g,
                                       std::optional<mpq_class> epsilon) {
  require_same_ctx(a, b);
  if (!(g.left() == a) || !(g.right() == b)) {
    throw Error(ErrorCode::kInvalidArgument, "graph is not over A x B");
  }
  if (a.contains_zero() || b.contains_zero()) {
    throw Error(ErrorCode::kZeroElementPresent, "ratios need 0 outside A and B");
  }
  const FieldCtx& ctx = a.ctx();

  // Edges are sorted by (i, j), so the first edge reaching ξ is the
  // lexicographically smallest representative.
  std::vector<std::tuple<Elem, std::uint32_t, std::uint32_t>> reps;
  reps.reserve(g.edge_count());
  for (const auto& [i, j] : g.edges()) reps.emplace_back(ctx.sub(a[i], b[j]), i, j);
  std::stable_sort(reps.begin(), reps.end(),
                   [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
  reps.erase(std::unique(reps.begin(), reps.end(),
                         [](const auto& x, const auto& y) { return std::get<0>(x) == std::get<0>(y); }),
             reps.end());

  struct Image {
    Elem t1;
    Elem t2;
    std::size_t xi;
    std::size_t c;
    std::size_t d;
  };
  std::vector<Image> images;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const Elem& ax = a[std::get<1>(reps[k])];
    const Elem& bx = b[std::get<2>(reps[k])];
    const Elem x = ctx.div(ax, bx);
    for (std::size_t d = 0; d < b.size(); ++d) {
      auto c = a.index_of(ctx.mul(x, b[d]));
      if (!c) continue;
      images.push_back({ctx.add(ax, ctx.mul(ax, b[d])), ctx.add(bx, ctx.mul(bx, a[*c])), k, *c, d});
    }
  }
  std::sort(images.begin(), images.end(), [](const Image& x, const Image& y) {
    return std::tie(x.t1, x.t2) < std::tie(y.t1, y.t2);
  });
  for (std::size_t k = 1; k < images.size(); ++k) {
    const Image& x = images[k - 1];
    const Image& y = images[k];
    if (x.t1 == y.t1 && x.t2 == y.t2) {
      auto pre = [&](const Image& im) {
        return "(" + ctx.render(std::get<0>(reps[im.xi])) + ", (" + ctx.render(a[im.c]) + ", " +
               ctx.render(b[im.d]) + "))";
      };
      throw Error(ErrorCode::kCollisionFound, pre(x) + " and " + pre(y) + " both map to (" +
                                                  ctx.render(x.t1) + ", " + ctx.render(x.t2) + ")");
    }
  }

  InjectionCertificate cert;
  cert.partial_diff_size = reps.size();
  cert.s_size = images.size();
  cert.codomain_size = expander_set(a, b).size() * expander_set(b, a).size();
  cert.bounded = cert.s_size <= cert.codomain_size;
  if (epsilon) {
    const u64 ratio_size = combine(a, b, SetOp::kRatio).size();
    cert.ordinate_bound = q(cert.s_size) * q(ratio_size) >=
                          *epsilon * q(a.size()) * q(b.size()) * q(cert.partial_diff_size);
  }
  return cert;
}

FSet dense_degree_subset(const PairGraph& g, const mpq_class& epsilon) {
  require_epsilon(epsilon, 1, true);
  require_dense(g, epsilon);
  const u64 n = g.right().size();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < g.left().size(); ++i) {
    if (degree_dense(g.degree_left(i), n, epsilon)) keep.push_back(i);
  }
  return g.left().select(keep);
}

CoverResult greedy_cover(const FSet& a, const FSet& b, const PairGraph& g,
                         const mpq_class& epsilon, CoverSign sign) {
  require_same_ctx(a, b);
  if (!(g.left() == a) || !(g.right() == b)) {
    throw Error(ErrorCode::kInvalidArgument, "graph is not over A x B");
  }
  if (b.empty()) throw Error(ErrorCode::kSetTooSmall, "B is empty");
  require_epsilon(epsilon, mpq_class(1, 4), false);
  require_dense(g, epsilon);
  const FieldCtx& ctx = a.ctx();

  CoverResult r{dense_degree_subset(g, epsilon), FSet(ctx), {}, sign, 0, 0, {}, false, false};
  // The shift s of translate s ± B is counted by #{(a', b') : a' ∓ b' = s}.
  const FSet signed_b = sign == CoverSign::kPlus ? b : negate(b);
  r.partial_size =
      partial_combine(g, sign == CoverSign::kPlus ? SetOp::kDiff : SetOp::kSum).size();

  const mpq_class a1 = q(r.dense_rows.size());
  FSet remaining = r.dense_rows;
  std::vector<Elem> discarded;
  // Stop once |remaining| <= sqrt(eps)|A_1|.
  while (!remaining.empty() && q(remaining.size()) * q(remaining.size()) > epsilon * a1 * a1) {
    const auto shifts = multiplicities(remaining, signed_b, HistogramKind::kAdditiveShift);
    const auto best = std::max_element(shifts.begin(), shifts.end(), [](const auto& x, const auto& y) {
      return x.second < y.second;
    });
    const Elem shift = best->first;
    std::vector<Elem> hit;
    std::vector<Elem> kept;
    for (const Elem& e : remaining) {
      // e ∈ s + B  (or s - B)  iff  e - s ∈ ±B.
      (signed_b.contains(ctx.sub(e, shift)) ? hit : kept).push_back(e);
    }
    CoverStep step{shift, remaining.size(), hit.size(), false};
    if (r.partial_size > 0) {
      const mpq_class ratio =
          q(step.discarded) * q(r.partial_size) / (q(step.remaining_before) * q(b.size()));
      step.guarantee_holds = ge_one_minus_sqrt_squared(ratio, epsilon);
    }
    r.steps.push_back(step);
    r.translates.push_back(shift);
    discarded.insert(discarded.end(), hit.begin(), hit.end());
    remaining = FSet(ctx, std::move(kept));
  }
  r.iterations = r.steps.size();
  r.covered = FSet(ctx, std::move(discarded));

  r.containment_holds = std::all_of(r.covered.begin(), r.covered.end(), [&](const Elem& e) {
    return std::any_of(r.translates.begin(), r.translates.end(),
                       [&](const Elem& t) { return signed_b.contains(ctx.sub(e, t)); });
  });
  r.size_contract_holds =
      a.empty() || ge_one_minus_c_sqrt(q(r.covered.size()) / q(a.size()), 2, epsilon);
  return r;
}

PartialRuzsaResult partial_ruzsa(const PairGraph& g, const PairGraph& h, const mpq_class& epsilon) {
  if (!(g.right() == h.left())) {
    throw Error(ErrorCode::kInvalidArgument, "G and H must share the middle set B");
  }
  require_epsilon(epsilon, mpq_class(1, 4), true);
  const FSet& b = g.right();
  const FieldCtx& ctx = b.ctx();
  const PairGraph ht = h.transpose();

  PartialRuzsaResult r{dense_degree_subset(g, epsilon), dense_degree_subset(ht, epsilon), 0, 0, 0, 0, 0, {}};
  r.g_partial = partial_combine(g, SetOp::kDiff).size();
  r.h_partial = partial_combine(h, SetOp::kDiff).size();

  auto neighbours = [&](const PairGraph& graph, const Elem& e) {
    std::vector<std::uint32_t> out;
    for (const auto& edge : graph.row(*graph.left().index_of(e))) out.push_back(edge.second);
    return out;
  };
  std::vector<std::vector<std::uint32_t>> ba;
  std::vector<std::vector<std::uint32_t>> bc;
  for (const Elem& e : r.a_prime) ba.push_back(neighbours(g, e));
  for (const Elem& e : r.c_prime) bc.push_back(neighbours(ht, e));

  auto common = [](const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) {
    std::vector<std::uint32_t> out;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return out;
  };
  for (std::size_t i = 0; i < ba.size(); ++i) {
    for (std::size_t k = 0; k < bc.size(); ++k) {
      const auto both = common(ba[i], bc[k]);
      if (!ge_one_minus_c_sqrt(q(both.size()) / q(b.size()), 2, epsilon)) {
        throw Error(ErrorCode::kWitnessFailure, "|B_a ∩ B_c| below (1-2 sqrt eps)|B|");
      }
    }
  }

  // Representatives (a(x), c(x)): the lexicographically smallest index pair.
  std::vector<std::tuple<Elem, std::size_t, std::size_t>> reps;
  for (std::size_t i = 0; i < r.a_prime.size(); ++i) {
    for (std::size_t k = 0; k < r.c_prime.size(); ++k) {
      reps.emplace_back(ctx.sub(r.a_prime[i], r.c_prime[k]), i, k);
    }
  }
  std::stable_sort(reps.begin(), reps.end(),
                   [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
  reps.erase(std::unique(reps.begin(), reps.end(),
                         [](const auto& x, const auto& y) { return std::get<0>(x) == std::get<0>(y); }),
             reps.end());
  r.difference_size = reps.size();

  std::vector<std::pair<Elem, Elem>> images;
  for (const auto& [x, i, k] : reps) {
    for (std::uint32_t j : common(ba[i], bc[k])) {
      images.emplace_back(ctx.sub(r.a_prime[i], b[j]), ctx.sub(b[j], r.c_prime[k]));
    }
  }
  r.y_size = images.size();
  std::sort(images.begin(), images.end());
  if (std::adjacent_find(images.begin(), images.end()) != images.end()) {
    throw Error(ErrorCode::kCollisionFound, "Y -> (A -G B) x (B -H C) is not injective");
  }
  if (r.y_size > r.g_partial * r.h_partial) {
    throw Error(ErrorCode::kWitnessFailure, "|Y| exceeds |A -G B||B -H C|");
  }

  const mpq_class rhs = q(r.g_partial) * q(r.h_partial);
  const mpq_class base = q(b.size()) * q(r.difference_size);
  r.shape_slack = rhs == 0 ? mpq_class(0) : base / rhs;

  InequalityReport& rep = r.report;
  rep.name = "partial_ruzsa";
  rep.rhs = rhs;
  rep.lhs = multiply(one_minus_c_sqrt(2, epsilon), mpq_class(base));
  // (1 - 2 sqrt eps)·base <= rhs  iff  rhs/base >= 1 - 2 sqrt eps.
  const bool holds = sgn(base) == 0 || ge_one_minus_c_sqrt(rhs / base, 2, epsilon);
  rep.verdict = holds ? Verdict::kHolds : Verdict::kFails;
  if (rhs != 0) {
    rep.slack = ratio(rep.lhs, rep.rhs);
  } else {
    rep.slack = mpq_class(0);
    rep.notes = "rhs is zero";
  }
  std::vector<const FSet*> sets{&g.left(), &b, &h.right()};
  rep.instance_digest = instance_digest(sets, "partial_ruzsa eps=" + render_rational(epsilon));
  return r;
}

PlunneckeResult plunnecke_witness(const FSet& a, std::span<const FSet> xs, std::size_t budget) {
  if (xs.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one X_j");
  if (a.empty()) throw Error(ErrorCode::kSetTooSmall, "A is empty");
  for (const FSet& x : xs) require_same_ctx(a, x);
  if (a.size() > budget || a.size() > 24) {
    throw Error(ErrorCode::kBudgetExceeded, "|A| = " + std::to_string(a.size()) +
                                                " exceeds the subset budget " +
                                                std::to_string(budget));
  }
  const std::size_t n = a.size();
  const std::size_t k = xs.size();

  FSet total = xs[0];
  for (std::size_t j = 1; j < k; ++j) total = combine(total, xs[j], SetOp::kSum);

  PlunneckeResult r{a, 0, {}, 0, 0, 0, {}};
  mpq_class denom = 1;
  for (const FSet& x : xs) {
    r.single_sumset_sizes.push_back(combine(a, x, SetOp::kSum).size());
    denom *= q(r.single_sumset_sizes.back());
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), n, k - 1);

  const std::size_t min_size = (n + 1) / 2;
  std::vector<std::size_t> best_idx;
  std::optional<mpq_class> best;
  for (u64 mask = 1; mask < (u64{1} << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) < min_size) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) idx.push_back(i);
    }
    const FSet sub = a.select(idx);
    const u64 size = combine(sub, total, SetOp::kSum).size();
    const mpq_class slack = q(size) * mpq_class(scale) / denom;
    if (idx.size() == n) r.full_set_slack = slack;
    if (!best || slack < *best || (slack == *best && idx < best_idx)) {
      best = slack;
      best_idx = idx;
      r.best_subset = sub;
      r.subset_sumset_size = size;
    }
  }
  r.slack = *best;
  r.size_ratio = q(r.best_subset.size()) / q(n);

  r.report = slack_only("plunnecke", mpq_class(q(r.subset_sumset_size) * mpq_class(scale)), denom);
  std::vector<const FSet*> sets{&a};
  for (const FSet& x : xs) sets.push_back(&x);
  r.report.instance_digest = instance_digest(sets, "plunnecke");
  r.report.notes = "|A'|/|A| = " + render_rational(r.size_ratio);
  return r;
}

}  // namespace expanderlab
