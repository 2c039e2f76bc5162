#ifndef EXPANDERLAB_ENERGY_HPP_
#define EXPANDERLAB_ENERGY_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "expanderlab/fset.hpp"
#include "expanderlab/interval.hpp"

namespace expanderlab {

enum class HistogramKind {
  kProduct,        // x ∈ AB,  m(x) = #{(a,b) : ab = x}
  kRatio,          // x ∈ A/B, m(x) = #{(a,b) : a/b = x} = |A ∩ xB|
  kAdditiveShift,  // x ∈ A-B, m(x) = #{(a,b) : a-b = x}
};

std::string_view histogram_kind_name(HistogramKind kind);

// Multiplicity spectrum m -> #{x : m(x) = m}. Bins are ascending in m and
// every recorded count is positive.
struct MultiplicityHistogram {
  HistogramKind kind = HistogramKind::kRatio;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> bins;
  std::uint64_t total_support = 0;
  std::uint64_t left_size = 0;
  std::uint64_t right_size = 0;

  // Σ m·count; equals |A||B|.
  std::uint64_t pair_count() const;
  std::uint64_t max_multiplicity() const { return bins.empty() ? 0 : bins.back().first; }
  // (m <= delta, m > delta).
  std::pair<MultiplicityHistogram, MultiplicityHistogram> split(std::uint64_t delta) const;
};

// Support elements with their multiplicities, in canonical element order.
std::vector<std::pair<Elem, std::uint64_t>> multiplicities(const FSet& a, const FSet& b,
                                                           HistogramKind kind);

// Throws kZeroElementPresent when 0 ∈ A ∪ B for the product/ratio kinds.
MultiplicityHistogram histogram(const FSet& a, const FSet& b, HistogramKind kind);

struct EnergyOptions {
  long start_precision = kDefaultStartPrecision;
  long precision_cap = kDefaultPrecisionCap;
  long target_relative_bits = 64;
};

struct EnergyValue {
  mpq_class alpha;
  // Set for integer alpha; the interval is then the point [exact, exact].
  std::optional<mpz_class> exact;
  Interval enclosure;
  long precision_bits = 0;
  // For half-integer alpha: the value as Σ coeff·sqrt(kernel), kernel squarefree.
  std::map<mpz_class, mpz_class> surd;
};

// Σ count(m)·m^alpha for alpha >= 1. Exact for integer alpha; otherwise a
// certified enclosure refined by doubling the precision until its relative
// width is below 2^-target_relative_bits. Each refinement is intersected with
// the previous enclosure, so reported intervals only ever shrink. Throws
// kPrecisionCapExceeded if the cap is hit first.
EnergyValue energy(const MultiplicityHistogram& hist, const mpq_class& alpha,
                   const EnergyOptions& options = {});
// One evaluation at a fixed precision, no refinement.
Interval energy_at_precision(const MultiplicityHistogram& hist, const mpq_class& alpha,
                             long precision_bits);

// E_2 of a ratio (or product) histogram as an exact integer.
mpz_class energy2(const MultiplicityHistogram& hist);
mpz_class energy_integer(const MultiplicityHistogram& hist, unsigned long alpha);

// S_t(A,B) = {s ∈ AB : |A ∩ sB^{-1}| >= t}. Throws kZeroElementPresent / kTOutOfRange.
FSet rich_products(const FSet& a, const FSet& b, std::uint64_t t);

// #{(a,b,a',b') : a+b = a'+b'}.
mpz_class additive_energy(const FSet& a, const FSet& b);

// E(A, ξA) = #{(a,b,c,d) ∈ A^4 : a + ξb = c + ξd}. Throws kZeroTwist.
mpz_class twisted_energy(const FSet& a, const Elem& xi);

// m = s^2 k with k squarefree.
std::pair<mpz_class, mpz_class> squarefree_decomposition(std::uint64_t m);

}  // namespace expanderlab

#endif  // EXPANDERLAB_ENERGY_HPP_
