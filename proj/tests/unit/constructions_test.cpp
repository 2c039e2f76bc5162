#include <gtest/gtest.h>

#include <map>

#include "expanderlab/constructions.hpp"
#include "expanderlab/set_arith.hpp"
#include "oracles.hpp"

using namespace expanderlab;

namespace {

FSet fp(unsigned long p, std::initializer_list<long> v) { return FSet::from_ints(FieldCtx::prime_field(p), v); }
FSet qs(std::initializer_list<long> v) { return FSet::from_ints(FieldCtx::rational(), v); }

// |S| from its definition: for each ξ ∈ A -_G B take the smallest edge (a,b)
// with a - b = ξ, then count all (c,d) ∈ A × B with c/d = a/b.
std::uint64_t oracle_s_size(const PairGraph& g) {
  const oracle::Arith k = oracle::arith_of(g.left());
  const auto va = oracle::values(g.left());
  const auto vb = oracle::values(g.right());
  std::map<mpq_class, std::pair<mpq_class, mpq_class>> rep;
  for (const auto& [i, j] : g.edges()) {
    const mpq_class xi = k.sub(va[i], vb[j]);
    if (!rep.count(xi)) rep.emplace(xi, std::make_pair(va[i], vb[j]));
  }
  std::uint64_t s = 0;
  for (const auto& [xi, ab] : rep) s += oracle::ratio_mult(k, va, vb, k.div(ab.first, ab.second));
  return s;
}

PairGraph drop_edges(oracle::Gen& gen, const FSet& a, const FSet& b, std::uint64_t one_in) {
  std::vector<PairGraph::Edge> edges;
  for (std::uint32_t i = 0; i < a.size(); ++i)
    for (std::uint32_t j = 0; j < b.size(); ++j)
      if (gen.below(one_in) != 0) edges.emplace_back(i, j);
  return PairGraph(a, b, edges);
}

}  // namespace

TEST(PopularRatio, SubgroupExample) {
  const FSet sub = fp(7, {1, 2, 4});
  const PopularRatioResult r = popular_ratio_graph(sub, sub, mpq_class(1, 2));
  EXPECT_EQ(r.popular, sub);
  EXPECT_EQ(r.graph.edge_count(), 9u);
  EXPECT_EQ(r.ratio_set_size, 3u);
}

TEST(PopularRatio, TinyEpsilonKeepsEverything) {
  const FSet a = fp(101, {2, 5, 9, 17});
  const FSet b = fp(101, {3, 4, 50});
  const mpq_class eps(1, static_cast<unsigned long>(a.size() * b.size() + 1));
  const PopularRatioResult r = popular_ratio_graph(a, b, eps);
  EXPECT_EQ(r.popular, combine(a, b, SetOp::kRatio));
  EXPECT_EQ(r.graph.edge_count(), a.size() * b.size());
}

TEST(PopularRatio, Guards) {
  const FSet a = fp(101, {2, 5});
  try {
    popular_ratio_graph(fp(101, {0, 5}), a, mpq_class(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroElementPresent);
  }
  for (const mpq_class& bad : {mpq_class(0), mpq_class(1), mpq_class(3, 2)}) {
    try {
      popular_ratio_graph(a, a, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEpsilonOutOfRange);
    }
  }
}

TEST(PopularRatioProperty, GraphContract) {
  oracle::Gen gen(41);
  const FieldCtx f = FieldCtx::prime_field(101);
  for (int i = 0; i < 200; ++i) {
    const FSet a = i % 2 ? gen.fp_set(f, 1, 10, {0}) : gen.q_set(1, 10, {0});
    const FSet b = i % 2 ? gen.fp_set(f, 1, 10, {0}) : gen.q_set(1, 10, {0});
    const mpq_class eps = i % 3 == 0 ? mpq_class(1, 4) : mpq_class(1, 2 + gen.below(30));
    const PopularRatioResult r = popular_ratio_graph(a, b, eps);
    const oracle::Arith k = oracle::arith_of(a);
    const auto va = oracle::values(a), vb = oracle::values(b);
    const mpq_class nab(static_cast<unsigned long>(a.size() * b.size()));
    const mpq_class ratios(static_cast<unsigned long>(oracle::combine(k, va, vb, oracle::Op::kRatio).size()));
    // |G| >= (1 - ε)|A||B| and |G| = Σ_{x ∈ X} |A ∩ xB|.
    EXPECT_GE(mpq_class(static_cast<unsigned long>(r.graph.edge_count())), (1 - eps) * nab);
    std::uint64_t mass = 0;
    for (const Elem& x : r.popular) mass += oracle::ratio_mult(k, va, vb, x.value());
    EXPECT_EQ(mass, r.graph.edge_count());
    for (const auto& [u, v] : r.graph.edges()) {
      const mpq_class x = k.div(va[u], vb[v]);
      EXPECT_TRUE(r.popular.contains(a.ctx().from_canonical(x)));
      EXPECT_GE(mpq_class(static_cast<unsigned long>(oracle::ratio_mult(k, va, vb, x))) * ratios, eps * nab);
    }
    EXPECT_EQ(r.partial_diff, partial_combine(r.graph, SetOp::kDiff));
  }
}

TEST(Injection, EmptyAndSubgroup) {
  const FSet sub = fp(7, {1, 2, 4});
  const InjectionCertificate empty = injection_witness(sub, sub, PairGraph::empty(sub, sub));
  EXPECT_EQ(empty.s_size, 0u);
  EXPECT_TRUE(empty.bounded);
  const PairGraph full = PairGraph::complete(sub, sub);
  const InjectionCertificate c = injection_witness(sub, sub, full);
  EXPECT_EQ(c.s_size, oracle_s_size(full));
  EXPECT_EQ(c.partial_diff_size, combine(sub, sub, SetOp::kDiff).size());
  EXPECT_TRUE(c.bounded);
}

TEST(InjectionProperty, NoCollisionsAndOrdinateBound) {
  oracle::Gen gen(42);
  const FieldCtx f = FieldCtx::prime_field(101);
  for (int i = 0; i < 200; ++i) {
    const FSet a = i % 2 ? gen.fp_set(f, 1, 10, {0}) : gen.q_set(1, 10, {0});
    const FSet b = i % 2 ? gen.fp_set(f, 1, 10, {0}) : gen.q_set(1, 10, {0});
    const mpq_class eps(1, 2 + gen.below(10));
    const PopularRatioResult pr = popular_ratio_graph(a, b, eps);
    const InjectionCertificate c = injection_witness(a, b, pr.graph, eps);
    EXPECT_EQ(c.s_size, oracle_s_size(pr.graph));
    EXPECT_EQ(c.partial_diff_size, pr.partial_diff.size());
    EXPECT_TRUE(c.bounded);
    ASSERT_TRUE(c.ordinate_bound.has_value());
    EXPECT_TRUE(*c.ordinate_bound);
  }
}

TEST(DenseDegree, Examples) {
  const FSet a = fp(101, {1, 2, 3, 4});
  const FSet b = fp(101, {5, 6, 7, 8});
  EXPECT_EQ(dense_degree_subset(PairGraph::complete(a, b), mpq_class(1, 3)), a);
  std::vector<PairGraph::Edge> edges;
  for (std::uint32_t i = 0; i < 4; ++i)
    for (std::uint32_t j = 0; j < 4; ++j)
      if (!(i == 2 && j == 1)) edges.emplace_back(i, j);
  EXPECT_EQ(dense_degree_subset(PairGraph(a, b, edges), mpq_class(1, 16)), a);
  try {
    dense_degree_subset(PairGraph::empty(a, b), mpq_class(1, 16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGraphTooSparse);
  }
}

TEST(DenseDegreeProperty, ContractAndIdempotence) {
  oracle::Gen gen(43);
  const FieldCtx f = FieldCtx::prime_field(1009);
  for (int i = 0; i < 300; ++i) {
    const FSet a = gen.fp_set(f, 1, 12);
    const FSet b = gen.fp_set(f, 1, 12);
    const mpq_class eps(1, 2 + gen.below(40));
    const PairGraph g = drop_edges(gen, a, b, 4 + gen.below(40));
    if (mpq_class(static_cast<unsigned long>(g.edge_count())) <
        (1 - eps) * mpq_class(static_cast<unsigned long>(a.size() * b.size()))) {
      continue;
    }
    const FSet dense = dense_degree_subset(g, eps);
    // |A'| >= (1 - sqrt ε)|A| ⟺ (|A| - |A'|)^2 <= ε|A|^2.
    const mpq_class gap(static_cast<unsigned long>(a.size() - dense.size()));
    EXPECT_LE(gap * gap, eps * mpq_class(static_cast<unsigned long>(a.size() * a.size())));
    for (std::size_t u = 0; u < a.size(); ++u) {
      const mpq_class miss(static_cast<unsigned long>(b.size() - g.degree_left(u)));
      const bool dense_row = miss * miss <= eps * mpq_class(static_cast<unsigned long>(b.size() * b.size()));
      EXPECT_EQ(dense.contains(a[u]), dense_row);
    }
    const PairGraph restricted = g.restrict_left(dense);
    if (!dense.empty()) EXPECT_EQ(dense_degree_subset(restricted, eps), dense);
  }
}

TEST(GreedyCover, SingleTranslate) {
  const FSet b = fp(101, {3, 8, 20});
  const FSet a = translate(b, b.ctx().from_int(11));
  const CoverResult r = greedy_cover(a, b, PairGraph::complete(a, b), mpq_class(1, 16), CoverSign::kPlus);
  EXPECT_EQ(r.translates.size(), 1u);
  EXPECT_EQ(r.covered, a);
  EXPECT_TRUE(r.containment_holds);
  EXPECT_TRUE(r.size_contract_holds);

  const FSet same = qs({2, 5, 9});
  const CoverResult s = greedy_cover(same, same, PairGraph::complete(same, same), mpq_class(1, 64), CoverSign::kPlus);
  ASSERT_EQ(s.translates.size(), 1u);
  EXPECT_EQ(s.translates[0], same.ctx().zero());
}

TEST(GreedyCoverProperty, Contract) {
  oracle::Gen gen(44);
  const FieldCtx f = FieldCtx::prime_field(101);
  for (int i = 0; i < 200; ++i) {
    const mpq_class eps = i % 2 ? mpq_class(1, 16) : mpq_class(1, 64);
    const CoverSign sign = i % 4 < 2 ? CoverSign::kPlus : CoverSign::kMinus;
    const FSet a = i % 3 ? gen.fp_set(f, 1, 10, {0}) : gen.q_set(1, 10, {0});
    const FSet b = i % 3 ? gen.fp_set(f, 1, 10, {0}) : gen.q_set(1, 10, {0});
    const PairGraph g = popular_ratio_graph(a, b, eps).graph;
    const CoverResult r = greedy_cover(a, b, g, eps, sign);
    EXPECT_TRUE(r.containment_holds);
    EXPECT_TRUE(r.size_contract_holds);
    for (const CoverStep& s : r.steps) EXPECT_TRUE(s.guarantee_holds);
    // With sqrt ε rational here, 1 - 2 sqrt ε is 1/2 or 3/4.
    const mpq_class factor = eps == mpq_class(1, 16) ? mpq_class(1, 2) : mpq_class(3, 4);
    EXPECT_GE(mpq_class(static_cast<unsigned long>(r.covered.size())),
              factor * mpq_class(static_cast<unsigned long>(a.size())));
    EXPECT_TRUE(r.covered.is_subset_of(a));
    FSet cover(a.ctx());
    const FSet signed_b = sign == CoverSign::kPlus ? b : negate(b);
    for (const Elem& t : r.translates) cover = cover.unite(translate(signed_b, t));
    EXPECT_TRUE(r.covered.is_subset_of(cover));
  }
}

TEST(PartialRuzsa, CompleteGraphsGiveRuzsaTriangle) {
  const FSet a = fp(101, {1, 4, 9, 30});
  const FSet b = fp(101, {2, 3, 50});
  const FSet c = fp(101, {7, 8, 60, 61});
  const PartialRuzsaResult r =
      partial_ruzsa(PairGraph::complete(a, b), PairGraph::complete(b, c), mpq_class(0));
  EXPECT_EQ(r.a_prime, a);
  EXPECT_EQ(r.c_prime, c);
  EXPECT_EQ(r.difference_size, combine(a, c, SetOp::kDiff).size());
  EXPECT_EQ(r.report.verdict, Verdict::kHolds);
  EXPECT_LE(r.shape_slack, 1);
}

TEST(PartialRuzsaProperty, CertificatePasses) {
  oracle::Gen gen(45);
  const FieldCtx f = FieldCtx::prime_field(101);
  for (int i = 0; i < 100; ++i) {
    const FSet a = gen.fp_set(f, 1, 9, {0});
    const FSet b = gen.fp_set(f, 1, 9, {0});
    const FSet c = gen.fp_set(f, 1, 9, {0});
    const mpq_class eps = i % 2 ? mpq_class(1, 16) : mpq_class(1, 64);
    const PairGraph g = popular_ratio_graph(a, b, eps).graph;
    const PairGraph h = popular_ratio_graph(b, c, eps).graph;
    const PartialRuzsaResult r = partial_ruzsa(g, h, eps);
    EXPECT_EQ(r.report.verdict, Verdict::kHolds);
    const mpq_class factor = eps == mpq_class(1, 16) ? mpq_class(1, 2) : mpq_class(3, 4);
    EXPECT_LE(factor * r.shape_slack, 1);
  }
}

TEST(Plunnecke, SingleSummandAndProgression) {
  const FSet a = fp(101, {3, 9, 27, 81});
  const FSet x = fp(101, {1, 5, 40});
  const std::vector<FSet> one{x};
  const PlunneckeResult r1 = plunnecke_witness(a, one);
  EXPECT_LE(r1.slack, 1);
  EXPECT_EQ(r1.full_set_slack, 1);

  const FSet ap = qs({0, 1, 2, 3, 4});
  const std::vector<FSet> two{ap, ap};
  const PlunneckeResult r2 = plunnecke_witness(ap, two);
  EXPECT_EQ(r2.single_sumset_sizes, (std::vector<std::uint64_t>{9, 9}));
  EXPECT_EQ(r2.full_set_slack, mpq_class(13 * 5, 81));
  EXPECT_LE(r2.slack, r2.full_set_slack);
  EXPECT_GE(r2.size_ratio, mpq_class(1, 2));
  EXPECT_EQ(r2.report.verdict, Verdict::kSlackOnly);
}

TEST(PlunneckeProperty, FiniteSlackAndMinimality) {
  oracle::Gen gen(46);
  const FieldCtx f = FieldCtx::prime_field(101);
  for (int i = 0; i < 30; ++i) {
    const FSet a = gen.fp_set(f, 8, 8);
    const std::vector<FSet> xs{gen.fp_set(f, 1, 6), gen.fp_set(f, 1, 6)};
    const PlunneckeResult r = plunnecke_witness(a, xs);
    EXPECT_GT(r.slack, 0);
    EXPECT_LE(r.slack, r.full_set_slack);
    EXPECT_GE(2 * r.best_subset.size(), a.size());
    EXPECT_TRUE(r.best_subset.is_subset_of(a));
  }
  try {
    const FSet big = gen.fp_set(f, 11, 11);
    const std::vector<FSet> xs{big};
    plunnecke_witness(big, xs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}
