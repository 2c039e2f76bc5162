#include "expanderlab/fset.hpp"

#include <algorithm>
#include <iterator>

namespace expanderlab {

FSet::FSet(FieldCtx ctx) : ctx_(std::move(ctx)) {}

FSet::FSet(FieldCtx ctx, std::vector<Elem> elements) : ctx_(std::move(ctx)) {
  for (const Elem& e : elements) ctx_.require_member(e);
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  elements_ = std::move(elements);
  fill_words();
}

FSet::FSet(FieldCtx ctx, std::vector<Elem> sorted_unique, Trusted)
    : ctx_(std::move(ctx)), elements_(std::move(sorted_unique)) {
  fill_words();
}

void FSet::fill_words() {
  if (!ctx_.small_modulus()) return;
  words_.reserve(elements_.size());
  for (const Elem& e : elements_) words_.push_back(e.numerator().get_ui());
}

FSet FSet::from_ints(const FieldCtx& ctx, std::span<const long> values) {
  std::vector<Elem> out;
  out.reserve(values.size());
  for (long v : values) out.push_back(ctx.from_int(v));
  return FSet(ctx, std::move(out));
}

FSet FSet::parse(const FieldCtx& ctx, const std::vector<std::string>& texts) {
  std::vector<Elem> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(ctx.parse(t));
  return FSet(ctx, std::move(out));
}

FSet FSet::from_words(const FieldCtx& ctx, std::vector<std::uint64_t> words) {
  const auto p = ctx.small_modulus();
  if (!p) throw Error(ErrorCode::kContextMismatch, "word sets need a prime below 2^32");
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  if (!words.empty() && words.back() >= *p) {
    throw Error(ErrorCode::kContextMismatch, "residue out of range");
  }
  std::vector<Elem> elems;
  elems.reserve(words.size());
  for (auto w : words) elems.push_back(ctx.from_mpz(mpz_class(static_cast<unsigned long>(w))));
  return FSet(ctx, std::move(elems), Trusted{});
}

bool FSet::contains(const Elem& e) const {
  return std::binary_search(elements_.begin(), elements_.end(), e);
}

std::optional<std::size_t> FSet::index_of(const Elem& e) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), e);
  if (it == elements_.end() || !(*it == e)) return std::nullopt;
  return static_cast<std::size_t>(it - elements_.begin());
}

bool FSet::contains_zero() const { return !elements_.empty() && contains(ctx_.zero()); }

void require_same_ctx(const FSet& a, const FSet& b) {
  if (!(a.ctx() == b.ctx())) {
    throw Error(ErrorCode::kContextMismatch,
                "sets over " + a.ctx().describe() + " and " + b.ctx().describe());
  }
}

bool FSet::is_subset_of(const FSet& other) const {
  require_same_ctx(*this, other);
  return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                       elements_.end());
}

FSet FSet::intersect(const FSet& other) const {
  require_same_ctx(*this, other);
  std::vector<Elem> out;
  std::set_intersection(elements_.begin(), elements_.end(), other.elements_.begin(),
                        other.elements_.end(), std::back_inserter(out));
  return FSet(ctx_, std::move(out), Trusted{});
}

FSet FSet::unite(const FSet& other) const {
  require_same_ctx(*this, other);
  std::vector<Elem> out;
  std::set_union(elements_.begin(), elements_.end(), other.elements_.begin(),
                 other.elements_.end(), std::back_inserter(out));
  return FSet(ctx_, std::move(out), Trusted{});
}

FSet FSet::minus(const FSet& other) const {
  require_same_ctx(*this, other);
  std::vector<Elem> out;
  std::set_difference(elements_.begin(), elements_.end(), other.elements_.begin(),
                      other.elements_.end(), std::back_inserter(out));
  return FSet(ctx_, std::move(out), Trusted{});
}

FSet FSet::select(std::span<const std::size_t> indices) const {
  std::vector<Elem> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(elements_.at(i));
  return FSet(ctx_, std::move(out));
}

std::size_t FSet::intersection_size(const FSet& other) const {
  require_same_ctx(*this, other);
  if (has_words()) {
    std::size_t n = 0;
    auto a = words_.begin();
    auto b = other.words_.begin();
    while (a != words_.end() && b != other.words_.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++n;
        ++a;
        ++b;
      }
    }
    return n;
  }
  std::size_t n = 0;
  auto a = elements_.begin();
  auto b = other.elements_.begin();
  while (a != elements_.end() && b != other.elements_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++n;
      ++a;
      ++b;
    }
  }
  return n;
}

std::vector<std::string> FSet::render() const {
  std::vector<std::string> out;
  out.reserve(elements_.size());
  for (const Elem& e : elements_) out.push_back(ctx_.render(e));
  return out;
}

PairGraph::PairGraph(FSet left, FSet right, std::vector<Edge> edges)
    : left_(std::move(left)), right_(std::move(right)) {
  require_same_ctx(left_, right_);
  for (const auto& [i, j] : edges) {
    if (i >= left_.size() || j >= right_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "edge index out of range");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  offsets_.assign(left_.size() + 1, 0);
  right_degree_.assign(right_.size(), 0);
  for (const auto& [i, j] : edges_) {
    ++offsets_[i + 1];
    ++right_degree_[j];
  }
  for (std::size_t i = 0; i < left_.size(); ++i) offsets_[i + 1] += offsets_[i];
}

PairGraph PairGraph::complete(const FSet& left, const FSet& right) {
  std::vector<Edge> edges;
  edges.reserve(left.size() * right.size());
  for (std::uint32_t i = 0; i < left.size(); ++i) {
    for (std::uint32_t j = 0; j < right.size(); ++j) edges.emplace_back(i, j);
  }
  return PairGraph(left, right, std::move(edges));
}

PairGraph PairGraph::empty(const FSet& left, const FSet& right) {
  return PairGraph(left, right, {});
}

bool PairGraph::has_edge(std::size_t i, std::size_t j) const {
  return std::binary_search(edges_.begin(), edges_.end(),
                            Edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
}

PairGraph PairGraph::transpose() const {
  std::vector<Edge> t;
  t.reserve(edges_.size());
  for (const auto& [i, j] : edges_) t.emplace_back(j, i);
  return PairGraph(right_, left_, std::move(t));
}

PairGraph PairGraph::restrict_left(const FSet& subset) const {
  if (!subset.is_subset_of(left_)) {
    throw Error(ErrorCode::kInvalidArgument, "restriction is not a subset of the left side");
  }
  std::vector<Edge> out;
  for (std::uint32_t k = 0; k < subset.size(); ++k) {
    const std::size_t i = *left_.index_of(subset[k]);
    for (const auto& e : row(i)) out.emplace_back(k, e.second);
  }
  return PairGraph(subset, right_, std::move(out));
}

}  // namespace expanderlab
