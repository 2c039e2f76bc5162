#ifndef EXPANDERLAB_SEARCH_HPP_
#define EXPANDERLAB_SEARCH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expanderlab/fset.hpp"
#include "expanderlab/interval.hpp"

namespace expanderlab {

enum class SearchMode { kExhaustive, kHillclimb, kAnneal };

std::string_view search_mode_name(SearchMode m);
SearchMode parse_search_mode(std::string_view text);  // throws kInvalidArgument

struct SearchConfig {
  FieldCtx ctx = FieldCtx::rational();
  std::size_t n = 2;
  SearchMode mode = SearchMode::kExhaustive;
  std::uint64_t seed = 0;
  std::uint64_t iteration_cap = 2000;  // per restart
  std::uint64_t budget = 5'000'000;    // max candidate sets for exhaustive mode
  bool density_guard = true;           // |A|^2 < p in F_p
  bool admit_degenerate = false;       // allow 0 and -1 in candidate sets
  long range_lo = -10;                 // integer universe for Q
  long range_hi = 10;
  std::size_t restarts = 20;
  double initial_temperature = 2.0;
  double cooling = 0.995;
  unsigned threads = 1;
};

struct ExtremalRecord {
  FSet witness;
  std::uint64_t value = 0;  // |A(A+1)|
  // Encloses log|A(A+1)| / log|A|; absent for n = 1.
  std::optional<Interval> exponent;
  bool certified_min = false;
  std::uint64_t seed = 0;
};

// Universe of admissible elements: F_p^* or integers in the range, minus 0
// and -1 unless admit_degenerate. Throws kInvalidArgument for p >= 2^32 or a
// range wider than 2^20, kDensityViolated when the guard fails.
std::vector<Elem> search_universe(const SearchConfig& cfg);

// Global minimum over all admissible n-sets; ties go to the smaller element
// sum, then the colexicographically smaller set. Throws kBudgetExceeded.
ExtremalRecord exhaustive_min(const SearchConfig& cfg);

// Seeded hill climbing or annealing with single-element swaps.
ExtremalRecord stochastic_search(const SearchConfig& cfg);

ExtremalRecord run_search(const SearchConfig& cfg);

// Encloses log(value)/log(n); exactly 1 when value == n.
std::optional<Interval> exponent_interval(std::uint64_t value, std::size_t n);

// (value, element sum, colex) order used for every merge.
bool record_better(const ExtremalRecord& a, const ExtremalRecord& b);

// Best record per (field, n), sorted by p ascending with Q last, then n.
std::vector<ExtremalRecord> exponent_table(const std::vector<ExtremalRecord>& records);

inline constexpr std::string_view kCsvHeader = "p,n,value,exponent_lo,exponent_hi,certified,witness,seed";

std::string records_to_csv(const std::vector<ExtremalRecord>& records);
// Parses the CSV and recomputes every |A(A+1)|; a mismatch throws kWitnessFailure.
std::vector<ExtremalRecord> load_records_csv(std::string_view text);

}  // namespace expanderlab

#endif  // EXPANDERLAB_SEARCH_HPP_
