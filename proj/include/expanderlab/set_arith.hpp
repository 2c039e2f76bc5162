#ifndef EXPANDERLAB_SET_ARITH_HPP_
#define EXPANDERLAB_SET_ARITH_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "expanderlab/fset.hpp"

namespace expanderlab {

enum class SetOp { kSum, kDiff, kProd, kRatio };

std::string_view set_op_name(SetOp op);

// {a op b : a ∈ A, b ∈ B}. Ratio throws kDivisionByZero when 0 ∈ B.
FSet combine(const FSet& a, const FSet& b, SetOp op);

// A(B+1) = {a(b+1) : a ∈ A, b ∈ B}.
FSet expander_set(const FSet& a, const FSet& b);

// {a op b : (a,b) ∈ G}. Ratio throws kDivisionByZero if an edge hits 0 on the right.
FSet partial_combine(const PairGraph& g, SetOp op);

// {Σ s_i a_i : a_i ∈ A} for signs s_i ∈ {+1, -1}.
FSet kfold_sum(const FSet& a, std::span<const int> signs);

// xA + y; throws kZeroDilation for x = 0.
FSet affine_image(const FSet& a, const Elem& x, const Elem& y);
inline FSet dilate(const FSet& a, const Elem& x) { return affine_image(a, x, a.ctx().zero()); }
FSet translate(const FSet& a, const Elem& y);
FSet negate(const FSet& a);
// A + 1.
FSet shift_by_one(const FSet& a);

// |A ∩ xB| by sorted merge.
std::size_t ratio_multiplicity(const FSet& a, const FSet& b, const Elem& x);

namespace detail {

// The two residue canonicalizers behind the word kernels. Both return the
// sorted distinct residues; the dense one marks a p-bit mask and is used for
// p <= 2^16.
std::vector<std::uint64_t> canonicalize_dense(std::vector<std::uint64_t> words, std::uint64_t p);
std::vector<std::uint64_t> canonicalize_sorted(std::vector<std::uint64_t> words);
std::vector<std::uint64_t> canonicalize(std::vector<std::uint64_t> words, std::uint64_t p);

inline constexpr std::uint64_t kDenseLimit = 1u << 16;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

}  // namespace detail

}  // namespace expanderlab

#endif  // EXPANDERLAB_SET_ARITH_HPP_
