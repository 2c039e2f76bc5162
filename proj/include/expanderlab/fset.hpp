#ifndef EXPANDERLAB_FSET_HPP_
#define EXPANDERLAB_FSET_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "expanderlab/field.hpp"

namespace expanderlab {

// Immutable finite set of field elements, strictly sorted by canonical order.
// For F_p with p < 2^32 the residues are also kept as machine words so the
// set kernels can skip big-number arithmetic.
class FSet {
 public:
  explicit FSet(FieldCtx ctx);
  // Sorts and deduplicates; throws kContextMismatch on non-members.
  FSet(FieldCtx ctx, std::vector<Elem> elements);

  // Integers are reduced mod p in a prime field.
  static FSet from_ints(const FieldCtx& ctx, std::span<const long> values);
  static FSet from_ints(const FieldCtx& ctx, std::initializer_list<long> values) {
    return from_ints(ctx, std::span<const long>(values.begin(), values.size()));
  }
  static FSet parse(const FieldCtx& ctx, const std::vector<std::string>& texts);
  // Words must be residues < p; they are sorted and deduplicated here.
  static FSet from_words(const FieldCtx& ctx, std::vector<std::uint64_t> words);

  const FieldCtx& ctx() const { return ctx_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const Elem& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<Elem>& elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  bool has_words() const { return ctx_.small_modulus().has_value(); }
  const std::vector<std::uint64_t>& words() const { return words_; }

  bool contains(const Elem& e) const;
  std::optional<std::size_t> index_of(const Elem& e) const;
  bool contains_zero() const;

  bool is_subset_of(const FSet& other) const;
  FSet intersect(const FSet& other) const;
  FSet unite(const FSet& other) const;
  FSet minus(const FSet& other) const;
  // Sub-set picked by ascending indices.
  FSet select(std::span<const std::size_t> indices) const;
  std::size_t intersection_size(const FSet& other) const;

  std::vector<std::string> render() const;

  friend bool operator==(const FSet& a, const FSet& b) {
    return a.ctx_ == b.ctx_ && a.elements_ == b.elements_;
  }

 private:
  struct Trusted {};
  FSet(FieldCtx ctx, std::vector<Elem> sorted_unique, Trusted);
  void fill_words();

  FieldCtx ctx_;
  std::vector<Elem> elements_;
  std::vector<std::uint64_t> words_;
};

// Throws kContextMismatch when the sets live in different fields.
void require_same_ctx(const FSet& a, const FSet& b);

// Explicit bipartite graph G ⊆ left × right over element indices.
class PairGraph {
 public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;

  // Deduplicates edges; throws kInvalidArgument on out-of-range indices.
  PairGraph(FSet left, FSet right, std::vector<Edge> edges);
  static PairGraph complete(const FSet& left, const FSet& right);
  static PairGraph empty(const FSet& left, const FSet& right);

  const FSet& left() const { return left_; }
  const FSet& right() const { return right_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  std::size_t degree_left(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t degree_right(std::size_t j) const { return right_degree_[j]; }
  // Right neighbours of left vertex i, ascending.
  std::span<const Edge> row(std::size_t i) const {
    return {edges_.data() + offsets_[i], degree_left(i)};
  }
  bool has_edge(std::size_t i, std::size_t j) const;

  PairGraph transpose() const;
  // G ∩ (subset × right) re-indexed over the subset; subset must be ⊆ left.
  PairGraph restrict_left(const FSet& subset) const;

 private:
  FSet left_;
  FSet right_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> right_degree_;
};

}  // namespace expanderlab

#endif  // EXPANDERLAB_FSET_HPP_
