#ifndef EXPANDERLAB_CONSTRUCTIONS_HPP_
#define EXPANDERLAB_CONSTRUCTIONS_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "expanderlab/fset.hpp"
#include "expanderlab/report.hpp"

namespace expanderlab {

// Popular ratios X = {x ∈ A/B : |A ∩ xB| >= ε|A||B|/|A/B|} and the graph of
// pairs whose ratio is popular.
struct PopularRatioResult {
  FSet popular;
  PairGraph graph;
  mpq_class epsilon;
  FSet partial_diff;  // A -_G B
  std::uint64_t ratio_set_size = 0;
  std::uint64_t expander_ab_size = 0;  // |A(B+1)|
  std::uint64_t expander_ba_size = 0;  // |B(A+1)|
  // |A(B+1)|·|B(A+1)|·|A/B| / (|A||B|)
  mpq_class bound_rhs_shape;
  // |A -_G B| / bound_rhs_shape
  mpq_class slack;
};

// Throws kZeroElementPresent, kEpsilonOutOfRange (needs 0 < ε < 1).
PopularRatioResult popular_ratio_graph(const FSet& a, const FSet& b, const mpq_class& epsilon);

struct InjectionCertificate {
  std::uint64_t partial_diff_size = 0;  // |A -_G B|
  std::uint64_t s_size = 0;             // |S|
  std::uint64_t codomain_size = 0;      // |A(B+1)|·|B(A+1)|
  bool bounded = false;                 // |S| <= codomain_size
  // |S|·|A/B| >= ε|A||B|·|A -_G B|, checked when ε is supplied.
  std::optional<bool> ordinate_bound;
};

// Enumerates S = {(ξ,(c,d)) : c/d = a(ξ)/b(ξ)} with representatives taken from
// G (lexicographically smallest edge per ξ), applies
// f(ξ,(c,d)) = (a + a·d, b + b·c) and checks it is injective into
// A(B+1) × B(A+1). Throws kCollisionFound with the colliding preimages.
InjectionCertificate injection_witness(const FSet& a, const FSet& b, const PairGraph& g,
                                       std::optional<mpq_class> epsilon = std::nullopt);

// A' = {a : deg_G(a) >= (1 - sqrt ε)|B|}, decided as (|B| - deg)^2 <= ε|B|^2.
// Throws kGraphTooSparse when |G| < (1-ε)|A||B|, kEpsilonOutOfRange unless 0 <= ε < 1.
FSet dense_degree_subset(const PairGraph& g, const mpq_class& epsilon);

enum class CoverSign { kPlus, kMinus };

struct CoverStep {
  Elem shift;
  std::uint64_t remaining_before = 0;  // |A*|
  std::uint64_t discarded = 0;
  // discarded·D >= |A*|·|B|·(1 - sqrt ε)^2, D the partial sumset size.
  bool guarantee_holds = false;
};

struct CoverResult {
  FSet dense_rows;  // A_1
  FSet covered;     // A'
  // covered ⊆ ∪ (t + B) for kPlus, ∪ (t - B) for kMinus.
  std::vector<Elem> translates;
  CoverSign sign = CoverSign::kPlus;
  std::size_t iterations = 0;
  // |A -_G B| for kPlus, |A +_G B| for kMinus.
  std::uint64_t partial_size = 0;
  std::vector<CoverStep> steps;
  bool containment_holds = false;
  bool size_contract_holds = false;  // |covered| >= (1 - 2 sqrt ε)|A|
};

// Greedy covering by translates of ±B. Throws kGraphTooSparse,
// kEpsilonOutOfRange (needs 0 < ε < 1/4).
CoverResult greedy_cover(const FSet& a, const FSet& b, const PairGraph& g,
                         const mpq_class& epsilon, CoverSign sign);

struct PartialRuzsaResult {
  FSet a_prime;
  FSet c_prime;
  std::uint64_t difference_size = 0;  // |A' - C'|
  std::uint64_t y_size = 0;           // |Y|
  std::uint64_t g_partial = 0;        // |A -_G B|
  std::uint64_t h_partial = 0;        // |B -_H C|
  // |A' - C'|·|B| / (|A -_G B|·|B -_H C|); the lemma gives <= 1/(1 - 2 sqrt ε).
  mpq_class shape_slack;
  // (1 - 2 sqrt ε)|B||A' - C'| <= |A -_G B|·|B -_H C|
  InequalityReport report;
};

// G ⊆ A×B, H ⊆ B×C sharing B. Accepts 0 <= ε < 1/4.
PartialRuzsaResult partial_ruzsa(const PairGraph& g, const PairGraph& h, const mpq_class& epsilon);

struct PlunneckeResult {
  FSet best_subset;
  std::uint64_t subset_sumset_size = 0;  // |A' + X_1 + ... + X_k|
  std::vector<std::uint64_t> single_sumset_sizes;  // |A + X_j|
  mpq_class slack;           // minimised over candidates
  mpq_class full_set_slack;  // the A' = A candidate
  mpq_class size_ratio;      // |A'| / |A|
  InequalityReport report;
};

inline constexpr std::size_t kDefaultPlunneckeBudget = 10;

// Exhaustive search over A' ⊆ A with |A'| >= ceil(|A|/2) minimising
// |A' + X_1 + ... + X_k|·|A|^(k-1) / Π|A + X_j|; ties go to the
// lexicographically smallest index list. Throws kBudgetExceeded.
PlunneckeResult plunnecke_witness(const FSet& a, std::span<const FSet> xs,
                                  std::size_t budget = kDefaultPlunneckeBudget);

}  // namespace expanderlab

#endif  // EXPANDERLAB_CONSTRUCTIONS_HPP_
