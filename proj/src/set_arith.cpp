#include "expanderlab/set_arith.hpp"

#include <algorithm>
#include <bit>

namespace expanderlab {

std::string_view set_op_name(SetOp op) {
  switch (op) {
    case SetOp::kSum: return "sum";
    case SetOp::kDiff: return "diff";
    case SetOp::kProd: return "prod";
    case SetOp::kRatio: return "ratio";
  }
  return "?";
}

namespace detail {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  // Fermat: a^(p-2).
  std::uint64_t result = 1;
  std::uint64_t base = a % p;
  std::uint64_t e = p - 2;
  while (e > 0) {
    if (e & 1) result = mul_mod(result, base, p);
    base = mul_mod(base, base, p);
    e >>= 1;
  }
  return result;
}

std::vector<std::uint64_t> canonicalize_dense(std::vector<std::uint64_t> words, std::uint64_t p) {
  std::vector<std::uint64_t> mask((p + 63) / 64, 0);
  for (auto w : words) mask[w >> 6] |= std::uint64_t{1} << (w & 63);
  words.clear();
  for (std::size_t blk = 0; blk < mask.size(); ++blk) {
    std::uint64_t bits = mask[blk];
    while (bits != 0) {
      words.push_back(blk * 64 + static_cast<std::uint64_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return words;
}

std::vector<std::uint64_t> canonicalize_sorted(std::vector<std::uint64_t> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

std::vector<std::uint64_t> canonicalize(std::vector<std::uint64_t> words, std::uint64_t p) {
  // The mask only pays off once the input is a decent fraction of p.
  if (p <= kDenseLimit && words.size() * 8 >= p / 64) return canonicalize_dense(std::move(words), p);
  return canonicalize_sorted(std::move(words));
}

}  // namespace detail

namespace {

using detail::mul_mod;
using u64 = std::uint64_t;

u64 apply_word(u64 a, u64 b, SetOp op, u64 p) {
  switch (op) {
    case SetOp::kSum: return (a + b) % p;
    case SetOp::kDiff: return (a + p - b) % p;
    case SetOp::kProd:
    case SetOp::kRatio: return mul_mod(a, b, p);  // ratio callers pass b^{-1}
  }
  return 0;
}

Elem apply_elem(const FieldCtx& ctx, const Elem& a, const Elem& b, SetOp op) {
  switch (op) {
    case SetOp::kSum: return ctx.add(a, b);
    case SetOp::kDiff: return ctx.sub(a, b);
    case SetOp::kProd: return ctx.mul(a, b);
    case SetOp::kRatio: return ctx.div(a, b);
  }
  return ctx.zero();
}

void require_nonzero_divisors(const FSet& b) {
  if (b.contains_zero()) throw Error(ErrorCode::kDivisionByZero, "ratio set with 0 in the divisor set");
}

// Right operands as used by the word kernel (inverted for ratios).
std::vector<u64> right_words(const FSet& b, SetOp op, u64 p) {
  std::vector<u64> w = b.words();
  if (op == SetOp::kRatio) {
    for (auto& x : w) x = detail::inv_mod(x, p);
  }
  return w;
}

}  // namespace

FSet combine(const FSet& a, const FSet& b, SetOp op) {
  require_same_ctx(a, b);
  if (op == SetOp::kRatio) require_nonzero_divisors(b);
  const FieldCtx& ctx = a.ctx();
  if (auto p = ctx.small_modulus()) {
    const auto rw = right_words(b, op, *p);
    std::vector<u64> out;
    out.reserve(a.size() * b.size());
    for (u64 x : a.words()) {
      for (u64 y : rw) out.push_back(apply_word(x, y, op, *p));
    }
    return FSet::from_words(ctx, detail::canonicalize(std::move(out), *p));
  }
  std::vector<Elem> out;
  out.reserve(a.size() * b.size());
  for (const Elem& x : a) {
    for (const Elem& y : b) out.push_back(apply_elem(ctx, x, y, op));
  }
  return FSet(ctx, std::move(out));
}

FSet expander_set(const FSet& a, const FSet& b) {
  require_same_ctx(a, b);
  return combine(a, shift_by_one(b), SetOp::kProd);
}

FSet partial_combine(const PairGraph& g, SetOp op) {
  const FSet& a = g.left();
  const FSet& b = g.right();
  const FieldCtx& ctx = a.ctx();
  if (op == SetOp::kRatio) {
    for (const auto& [i, j] : g.edges()) {
      if (b[j].is_zero()) throw Error(ErrorCode::kDivisionByZero, "edge divides by 0");
    }
  }
  if (auto p = ctx.small_modulus()) {
    std::vector<u64> rw = b.words();
    std::vector<u64> out;
    out.reserve(g.edge_count());
    for (const auto& [i, j] : g.edges()) {
      const u64 y = op == SetOp::kRatio ? detail::inv_mod(rw[j], *p) : rw[j];
      out.push_back(apply_word(a.words()[i], y, op, *p));
    }
    return FSet::from_words(ctx, detail::canonicalize(std::move(out), *p));
  }
  std::vector<Elem> out;
  out.reserve(g.edge_count());
  for (const auto& [i, j] : g.edges()) out.push_back(apply_elem(ctx, a[i], b[j], op));
  return FSet(ctx, std::move(out));
}

FSet kfold_sum(const FSet& a, std::span<const int> signs) {
  if (signs.empty()) throw Error(ErrorCode::kInvalidArgument, "k-fold sum needs k >= 1");
  for (int s : signs) {
    if (s != 1 && s != -1) throw Error(ErrorCode::kInvalidArgument, "signs must be +1 or -1");
  }
  FSet acc = signs[0] == 1 ? a : negate(a);
  for (std::size_t i = 1; i < signs.size(); ++i) {
    acc = combine(acc, a, signs[i] == 1 ? SetOp::kSum : SetOp::kDiff);
  }
  return acc;
}

FSet affine_image(const FSet& a, const Elem& x, const Elem& y) {
  const FieldCtx& ctx = a.ctx();
  ctx.require_member(x);
  ctx.require_member(y);
  if (x.is_zero()) throw Error(ErrorCode::kZeroDilation, "dilation by 0");
  if (auto p = ctx.small_modulus()) {
    const u64 xw = x.numerator().get_ui();
    const u64 yw = y.numerator().get_ui();
    std::vector<u64> out;
    out.reserve(a.size());
    for (u64 w : a.words()) out.push_back((mul_mod(w, xw, *p) + yw) % *p);
    return FSet::from_words(ctx, std::move(out));
  }
  std::vector<Elem> out;
  out.reserve(a.size());
  for (const Elem& e : a) out.push_back(ctx.add(ctx.mul(e, x), y));
  return FSet(ctx, std::move(out));
}

FSet translate(const FSet& a, const Elem& y) { return affine_image(a, a.ctx().one(), y); }

FSet negate(const FSet& a) {
  const FieldCtx& ctx = a.ctx();
  return affine_image(a, ctx.neg(ctx.one()), ctx.zero());
}

FSet shift_by_one(const FSet& a) { return translate(a, a.ctx().one()); }

std::size_t ratio_multiplicity(const FSet& a, const FSet& b, const Elem& x) {
  if (x.is_zero()) return a.contains_zero() && !b.empty() ? 1 : 0;
  return a.intersection_size(dilate(b, x));
}

}  // namespace expanderlab
