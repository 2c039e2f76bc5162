#include <gtest/gtest.h>

#include "expanderlab/energy.hpp"
#include "expanderlab/set_arith.hpp"
#include "oracles.hpp"

using namespace expanderlab;

namespace {

FSet fp(unsigned long p, std::initializer_list<long> v) { return FSet::from_ints(FieldCtx::prime_field(p), v); }

oracle::Op to_oracle(SetOp op) {
  switch (op) {
    case SetOp::kSum: return oracle::Op::kSum;
    case SetOp::kDiff: return oracle::Op::kDiff;
    case SetOp::kProd: return oracle::Op::kProd;
    case SetOp::kRatio: return oracle::Op::kRatio;
  }
  return oracle::Op::kSum;
}

// A random instance over F_p (p drawn up to 70000, so both residue
// canonicalizers get exercised) or over Q.
FSet random_set(oracle::Gen& gen, const FieldCtx& ctx, std::size_t max_size, std::vector<long> forbidden = {}) {
  return ctx.is_rational() ? gen.q_set(1, max_size, forbidden) : gen.fp_set(ctx, 1, max_size, forbidden);
}

FieldCtx random_ctx(oracle::Gen& gen, int i) {
  switch (i % 3) {
    case 0: return FieldCtx::prime_field(gen.prime_between(2, 200));
    case 1: return FieldCtx::prime_field(gen.prime_between(65500, 66000));
    default: return FieldCtx::rational();
  }
}

}  // namespace

TEST(FSet, CanonicalOrderAndDedup) {
  const FSet s = fp(7, {5, 12, -2, 3, 3});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.render(), (std::vector<std::string>{"3", "5"}));
  EXPECT_TRUE(s.has_words());
  EXPECT_EQ(s.words(), (std::vector<std::uint64_t>{3, 5}));
  const FSet q = FSet::parse(FieldCtx::rational(), {"2", "-3/2", "4/2"});
  EXPECT_EQ(q.render(), (std::vector<std::string>{"-3/2", "2"}));
}

TEST(SetArith, CombineExamples) {
  EXPECT_EQ(combine(fp(5, {0, 1}), fp(5, {0, 2}), SetOp::kSum), fp(5, {0, 1, 2, 3}));
  const FSet a = fp(11, {2, 3, 7});
  EXPECT_EQ(combine(a, fp(11, {0}), SetOp::kSum), a);
  EXPECT_EQ(combine(fp(7, {1, 2, 4}), fp(7, {1, 2, 4}), SetOp::kRatio), fp(7, {1, 2, 4}));
  try {
    combine(a, fp(11, {0, 1}), SetOp::kRatio);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivisionByZero);
  }
}

TEST(SetArith, ExpanderExamples) {
  EXPECT_EQ(expander_set(fp(7, {1, 2}), fp(7, {1, 2})), fp(7, {2, 3, 4, 6}));
  const FSet e = expander_set(fp(7, {2, 4}), fp(7, {2, 4}));
  EXPECT_EQ(e, fp(7, {3, 5, 6}));
  EXPECT_EQ(e.size(), 3u);
  EXPECT_EQ(expander_set(fp(7, {0}), fp(7, {0})), fp(7, {0}));
}

TEST(SetArith, PartialCombineExamples) {
  const FSet a = fp(7, {1, 2});
  const FSet b = fp(7, {3, 4});
  const PairGraph g(a, b, {{0, 0}, {1, 1}});
  EXPECT_EQ(partial_combine(g, SetOp::kDiff), fp(7, {5}));
  for (SetOp op : {SetOp::kSum, SetOp::kDiff, SetOp::kProd, SetOp::kRatio}) {
    EXPECT_EQ(partial_combine(PairGraph::complete(a, b), op), combine(a, b, op));
    EXPECT_TRUE(partial_combine(PairGraph::empty(a, b), op).empty());
  }
}

TEST(SetArith, KfoldAndAffineExamples) {
  const std::vector<int> one{+1};
  const FSet a = fp(11, {1, 5, 8});
  EXPECT_EQ(kfold_sum(a, one), a);
  const std::vector<int> pm{+1, -1};
  EXPECT_EQ(kfold_sum(fp(5, {0, 1}), pm), fp(5, {0, 1, 4}));
  const std::vector<int> four{+1, +1, +1, +1};
  const FSet s = kfold_sum(fp(7, {1, 2, 4}), four);
  const oracle::Arith k{7};
  EXPECT_EQ(oracle::values(s), oracle::kfold(k, {1, 2, 4}, {1, 1, 1, 1}));
  EXPECT_LE(s.size(), 7u);

  const FieldCtx f7 = FieldCtx::prime_field(7);
  EXPECT_EQ(affine_image(fp(7, {1, 2}), f7.from_int(2), f7.one()), fp(7, {3, 5}));
  EXPECT_EQ(affine_image(a, a.ctx().one(), a.ctx().zero()), a);
  try {
    dilate(a, a.ctx().zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDilation);
  }
}

TEST(SetArith, PairGraphInvariants) {
  const FSet a = fp(13, {1, 2, 3});
  const FSet b = fp(13, {4, 5});
  const PairGraph g(a, b, {{2, 1}, {0, 0}, {0, 0}, {0, 1}});
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.degree_left(0), 2u);
  EXPECT_EQ(g.degree_left(1), 0u);
  EXPECT_EQ(g.degree_left(2), 1u);
  EXPECT_EQ(g.degree_right(1), 2u);
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(1, 0));
  const PairGraph t = g.transpose();
  EXPECT_EQ(t.edge_count(), 3u);
  EXPECT_TRUE(t.has_edge(1, 2));
  try {
    PairGraph(a, b, {{3, 0}});
    FAIL();
  } catch (const Error&) {
  }
}

// combine, expander_set, kfold and affine images agree with the brute-force
// oracle; the size bounds and symmetry laws hold.
TEST(SetArithProperty, AgreesWithOracle) {
  oracle::Gen gen(2024);
  for (int i = 0; i < 300; ++i) {
    const FieldCtx ctx = random_ctx(gen, i);
    const FSet a = random_set(gen, ctx, 12);
    const FSet b = random_set(gen, ctx, 12, {0});
    const oracle::Arith k = oracle::arith_of(a);
    const auto va = oracle::values(a);
    const auto vb = oracle::values(b);
    for (SetOp op : {SetOp::kSum, SetOp::kDiff, SetOp::kProd, SetOp::kRatio}) {
      const FSet r = combine(a, b, op);
      ASSERT_EQ(oracle::values(r), oracle::combine(k, va, vb, to_oracle(op))) << set_op_name(op);
      EXPECT_LE(r.size(), a.size() * b.size());
      if (ctx.is_prime_field()) EXPECT_LE(mpz_class(static_cast<unsigned long>(r.size())), ctx.modulus());
    }
    EXPECT_EQ(combine(a, b, SetOp::kSum), combine(b, a, SetOp::kSum));
    EXPECT_EQ(combine(a, b, SetOp::kProd), combine(b, a, SetOp::kProd));
    ASSERT_EQ(oracle::values(expander_set(a, b)), oracle::expander(k, va, vb));

    const Elem x = b[0];
    const Elem y = a[a.size() - 1];
    const FSet img = affine_image(a, x, y);
    EXPECT_EQ(img.size(), a.size());

    const std::vector<int> signs{+1, -1, +1};
    EXPECT_EQ(oracle::values(kfold_sum(a, signs)), oracle::kfold(k, va, {1, -1, 1}));
  }
}

TEST(SetArithProperty, RatioMultiplicitiesSumToPairs) {
  oracle::Gen gen(77);
  for (int i = 0; i < 300; ++i) {
    const FieldCtx ctx = random_ctx(gen, i);
    const FSet a = random_set(gen, ctx, 14, {0});
    const FSet b = random_set(gen, ctx, 14, {0});
    std::uint64_t total = 0;
    const oracle::Arith k = oracle::arith_of(a);
    for (const Elem& x : combine(a, b, SetOp::kRatio)) {
      const auto m = ratio_multiplicity(a, b, x);
      EXPECT_EQ(m, oracle::ratio_mult(k, oracle::values(a), oracle::values(b), x.value()));
      total += m;
    }
    EXPECT_EQ(total, a.size() * b.size());
  }
}

TEST(SetArithProperty, ExpanderFloorAndPartialSubset) {
  oracle::Gen gen(99);
  for (int i = 0; i < 300; ++i) {
    const FieldCtx ctx = random_ctx(gen, i);
    const FSet a = random_set(gen, ctx, 10);
    const FSet b = random_set(gen, ctx, 10);
    const bool only_minus_one = a.size() == 1 && a[0] == ctx.neg(ctx.one());
    if (!only_minus_one) EXPECT_GE(expander_set(a, a).size(), a.size());

    std::vector<PairGraph::Edge> edges;
    for (std::uint32_t u = 0; u < a.size(); ++u) {
      for (std::uint32_t v = 0; v < b.size(); ++v) {
        if (gen.below(3) == 0) edges.emplace_back(u, v);
      }
    }
    const PairGraph g(a, b, edges);
    std::size_t degree_sum = 0;
    for (std::size_t u = 0; u < a.size(); ++u) degree_sum += g.degree_left(u);
    EXPECT_EQ(degree_sum, g.edge_count());
    for (SetOp op : {SetOp::kSum, SetOp::kDiff, SetOp::kProd}) {
      EXPECT_TRUE(partial_combine(g, op).is_subset_of(combine(a, b, op)));
    }
  }
}

TEST(SetArithProperty, ResidueCanonicalizersAgree) {
  oracle::Gen gen(5);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t p = gen.prime_between(2, 5000);
    std::vector<std::uint64_t> words;
    const std::size_t n = gen.below(300);
    for (std::size_t k = 0; k < n; ++k) words.push_back(gen.below(p));
    const auto dense = detail::canonicalize_dense(words, p);
    const auto sorted = detail::canonicalize_sorted(words);
    EXPECT_EQ(dense, sorted);
    EXPECT_EQ(detail::canonicalize(words, p), sorted);
    EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end()));
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  }
}

TEST(SetArithProperty, ModularHelpers) {
  oracle::Gen gen(8);
  const std::uint64_t p = gen.prime_between(4000000000ull, 4000000100ull);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t a = 1 + gen.below(p - 1);
    const std::uint64_t b = gen.below(p);
    const mpz_class expect = mpz_class(static_cast<unsigned long>(a)) * static_cast<unsigned long>(b) %
                             static_cast<unsigned long>(p);
    EXPECT_EQ(detail::mul_mod(a, b, p), expect.get_ui());
    EXPECT_EQ(detail::mul_mod(a, detail::inv_mod(a, p), p), 1u);
  }
}
