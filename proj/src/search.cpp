#include "expanderlab/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "expanderlab/set_arith.hpp"

namespace expanderlab {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;

constexpr u64 kMaxSearchModulus = u64{1} << 32;
constexpr long kMaxRangeWidth = 1L << 20;
constexpr long kPrecision = 128;

u64 splitmix64(u64 x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, n) by rejection; std distributions differ across libraries.
u64 draw_below(std::mt19937_64& rng, u64 n) {
  const u64 threshold = (0 - n) % n;
  for (;;) {
    const u64 r = rng();
    if (r >= threshold) return r % n;
  }
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Candidate sets are index lists into the universe; values are residues in
// F_p or integers in Q, both fit in i64.
class Evaluator {
 public:
  Evaluator(const SearchConfig& cfg, std::vector<i64> universe)
      : p_(cfg.ctx.is_prime_field() ? static_cast<i64>(*cfg.ctx.small_modulus()) : 0),
        universe_(std::move(universe)) {}

  u64 value(const std::vector<std::size_t>& idx) {
    scratch_.clear();
    for (std::size_t i : idx) {
      for (std::size_t j : idx) {
        const i64 a = universe_[i];
        const i64 b1 = universe_[j] + 1;
        if (p_ != 0) {
          scratch_.push_back(static_cast<i64>(static_cast<u64>(a) * static_cast<u64>(b1 % p_) %
                                              static_cast<u64>(p_)));
        } else {
          scratch_.push_back(a * b1);
        }
      }
    }
    std::sort(scratch_.begin(), scratch_.end());
    return static_cast<u64>(std::unique(scratch_.begin(), scratch_.end()) - scratch_.begin());
  }

  i64 sum(const std::vector<std::size_t>& idx) const {
    i64 s = 0;
    for (std::size_t i : idx) s += universe_[i];
    return s;
  }

  const std::vector<i64>& universe() const { return universe_; }

 private:
  i64 p_;
  std::vector<i64> universe_;
  std::vector<i64> scratch_;
};

struct Candidate {
  u64 value = 0;
  i64 sum = 0;
  std::vector<i64> sorted;  // ascending element values

  bool valid() const { return !sorted.empty(); }
};

// Colex on equal-size sets: the first difference from the top decides.
bool colex_less(const std::vector<i64>& a, const std::vector<i64>& b) {
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid()) return a.valid();
  if (!a.valid()) return false;
  if (a.value != b.value) return a.value < b.value;
  if (a.sum != b.sum) return a.sum < b.sum;
  return colex_less(a.sorted, b.sorted);
}

Candidate make_candidate(Evaluator& ev, const std::vector<std::size_t>& idx) {
  Candidate c;
  c.value = ev.value(idx);
  c.sum = ev.sum(idx);
  for (std::size_t i : idx) c.sorted.push_back(ev.universe()[i]);
  std::sort(c.sorted.begin(), c.sorted.end());
  return c;
}

std::vector<i64> raw_universe(const SearchConfig& cfg) {
  std::vector<i64> out;
  if (cfg.ctx.is_prime_field()) {
    const auto p = cfg.ctx.small_modulus();
    if (!p || *p >= kMaxSearchModulus) {
      throw Error(ErrorCode::kInvalidArgument, "search needs p < 2^32");
    }
    if (cfg.density_guard) {
      const mpz_class n2 = mpz_class(static_cast<unsigned long>(cfg.n)) * static_cast<unsigned long>(cfg.n);
      if (n2 >= mpz_class(static_cast<unsigned long>(*p))) {
        throw Error(ErrorCode::kDensityViolated,
                    "n^2 = " + n2.get_str() + " is not below p = " + std::to_string(*p));
      }
    }
    const i64 pi = static_cast<i64>(*p);
    for (i64 x = 0; x < pi; ++x) {
      if (!cfg.admit_degenerate && (x == 0 || x == pi - 1)) continue;
      out.push_back(x);
    }
  } else {
    if (cfg.range_lo > cfg.range_hi) throw Error(ErrorCode::kInvalidArgument, "empty rational range");
    if (cfg.range_lo < -kMaxRangeWidth || cfg.range_hi > kMaxRangeWidth) {
      throw Error(ErrorCode::kInvalidArgument, "rational range must lie within [-2^20, 2^20]");
    }
    for (long x = cfg.range_lo; x <= cfg.range_hi; ++x) {
      if (!cfg.admit_degenerate && (x == 0 || x == -1)) continue;
      out.push_back(x);
    }
  }
  if (cfg.n == 0) throw Error(ErrorCode::kSetTooSmall, "n must be at least 1");
  if (out.size() < cfg.n) {
    throw Error(ErrorCode::kSetTooSmall, "universe has " + std::to_string(out.size()) +
                                             " admissible elements, fewer than n = " + std::to_string(cfg.n));
  }
  return out;
}

ExtremalRecord to_record(const SearchConfig& cfg, const Candidate& c, bool certified) {
  std::vector<Elem> elems;
  for (i64 v : c.sorted) elems.push_back(cfg.ctx.from_int(static_cast<long>(v)));
  ExtremalRecord r{FSet(cfg.ctx, std::move(elems)), c.value, exponent_interval(c.value, cfg.n),
                   certified, cfg.seed};
  return r;
}

unsigned thread_count(const SearchConfig& cfg, std::size_t jobs) {
  const unsigned t = std::max(1u, cfg.threads);
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

// Runs job(k) for k in [0, jobs) spread over threads; job k writes only slot k.
template <typename Job>
void parallel_for(unsigned threads, std::size_t jobs, Job job) {
  if (threads <= 1) {
    for (std::size_t k = 0; k < jobs; ++k) job(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < jobs; k += threads) job(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Candidate exhaustive_from(const SearchConfig& cfg, const std::vector<i64>& universe, std::size_t first) {
  Evaluator ev(cfg, universe);
  const std::size_t u = universe.size();
  const std::size_t n = cfg.n;
  Candidate best;
  std::vector<std::size_t> idx(n);
  idx[0] = first;
  for (std::size_t k = 1; k < n; ++k) idx[k] = first + k;
  if (idx[n - 1] >= u) return best;
  for (;;) {
    Candidate c = make_candidate(ev, idx);
    if (better(c, best)) best = std::move(c);
    // Advance positions 1..n-1 only; position 0 stays at first.
    std::size_t k = n;
    while (k > 1 && idx[k - 1] == u - n + k - 1) --k;
    if (k <= 1) break;
    ++idx[k - 1];
    for (std::size_t m = k; m < n; ++m) idx[m] = idx[m - 1] + 1;
  }
  return best;
}

Candidate restart_run(const SearchConfig& cfg, const std::vector<i64>& universe, std::size_t restart) {
  Evaluator ev(cfg, universe);
  std::mt19937_64 rng(splitmix64(cfg.seed + restart));
  const std::size_t u = universe.size();
  const std::size_t n = cfg.n;

  std::vector<std::size_t> pool(u);
  for (std::size_t i = 0; i < u; ++i) pool[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(pool[i], pool[i + draw_below(rng, u - i)]);
  }
  std::vector<std::size_t> cur(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<char> used(u, 0);
  for (std::size_t i : cur) used[i] = 1;

  Candidate cur_c = make_candidate(ev, cur);
  Candidate best = cur_c;
  if (u == n) return best;

  double temperature = cfg.initial_temperature;
  for (u64 it = 0; it < cfg.iteration_cap; ++it) {
    const std::size_t pos = draw_below(rng, n);
    std::size_t fresh;
    do {
      fresh = draw_below(rng, u);
    } while (used[fresh]);
    const std::size_t old = cur[pos];
    cur[pos] = fresh;
    Candidate cand = make_candidate(ev, cur);

    bool accept = cand.value <= cur_c.value;
    if (!accept && cfg.mode == SearchMode::kAnneal && temperature > 0) {
      const double delta = static_cast<double>(cand.value - cur_c.value);
      accept = draw_unit(rng) < std::exp(-delta / temperature);
    }
    if (accept) {
      used[old] = 0;
      used[fresh] = 1;
      if (better(cand, best)) best = cand;
      cur_c = std::move(cand);
    } else {
      cur[pos] = old;
    }
    temperature *= cfg.cooling;
  }
  return best;
}

mpz_class binomial(std::size_t n, std::size_t k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string field_label(const FieldCtx& ctx) {
  return ctx.is_rational() ? "Q" : ctx.modulus().get_str();
}

u64 parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, std::string("bad ") + what + " '" + s + "'");
  }
}

}  // namespace

std::string_view search_mode_name(SearchMode m) {
  switch (m) {
    case SearchMode::kExhaustive: return "exhaustive";
    case SearchMode::kHillclimb: return "hillclimb";
    case SearchMode::kAnneal: return "anneal";
  }
  return "?";
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "exhaustive") return SearchMode::kExhaustive;
  if (text == "hillclimb") return SearchMode::kHillclimb;
  if (text == "anneal") return SearchMode::kAnneal;
  throw Error(ErrorCode::kInvalidArgument, "unknown search mode '" + std::string(text) + "'");
}

std::vector<Elem> search_universe(const SearchConfig& cfg) {
  std::vector<Elem> out;
  for (i64 v : raw_universe(cfg)) out.push_back(cfg.ctx.from_int(static_cast<long>(v)));
  return out;
}

ExtremalRecord exhaustive_min(const SearchConfig& cfg) {
  const std::vector<i64> universe = raw_universe(cfg);
  const mpz_class total = binomial(universe.size(), cfg.n);
  if (total > mpz_class(static_cast<unsigned long>(cfg.budget))) {
    throw Error(ErrorCode::kBudgetExceeded, "C(" + std::to_string(universe.size()) + ", " +
                                                std::to_string(cfg.n) + ") = " + total.get_str() +
                                                " candidates exceed the budget " + std::to_string(cfg.budget));
  }
  const std::size_t jobs = universe.size() - cfg.n + 1;
  std::vector<Candidate> per_first(jobs);
  parallel_for(thread_count(cfg, jobs), jobs,
               [&](std::size_t k) { per_first[k] = exhaustive_from(cfg, universe, k); });
  Candidate best;
  for (auto& c : per_first) {
    if (better(c, best)) best = std::move(c);
  }
  return to_record(cfg, best, true);
}

ExtremalRecord stochastic_search(const SearchConfig& cfg) {
  const std::vector<i64> universe = raw_universe(cfg);
  if (cfg.restarts == 0) throw Error(ErrorCode::kInvalidArgument, "restarts must be positive");
  if (!(cfg.cooling > 0 && cfg.cooling <= 1)) throw Error(ErrorCode::kInvalidArgument, "cooling must lie in (0, 1]");
  std::vector<Candidate> per_restart(cfg.restarts);
  parallel_for(thread_count(cfg, cfg.restarts), cfg.restarts,
               [&](std::size_t k) { per_restart[k] = restart_run(cfg, universe, k); });
  Candidate best;
  for (auto& c : per_restart) {
    if (better(c, best)) best = std::move(c);
  }
  return to_record(cfg, best, false);
}

ExtremalRecord run_search(const SearchConfig& cfg) {
  return cfg.mode == SearchMode::kExhaustive ? exhaustive_min(cfg) : stochastic_search(cfg);
}

std::optional<Interval> exponent_interval(u64 value, std::size_t n) {
  if (n < 2) return std::nullopt;
  if (value == n) return Interval::from_mpz(1, kPrecision);
  const mpz_class v(static_cast<unsigned long>(value));
  const mpz_class m(static_cast<unsigned long>(n));
  return Interval::log(v, kPrecision) / Interval::log(m, kPrecision);
}

bool record_better(const ExtremalRecord& a, const ExtremalRecord& b) {
  if (a.value != b.value) return a.value < b.value;
  mpq_class sa = 0, sb = 0;
  for (const Elem& e : a.witness) sa += e.value();
  for (const Elem& e : b.witness) sb += e.value();
  if (sa != sb) return sa < sb;
  if (a.witness.size() != b.witness.size()) return a.witness.size() < b.witness.size();
  for (std::size_t k = a.witness.size(); k-- > 0;) {
    if (a.witness[k] != b.witness[k]) return a.witness[k] < b.witness[k];
  }
  return false;
}

std::vector<ExtremalRecord> exponent_table(const std::vector<ExtremalRecord>& records) {
  using Key = std::tuple<bool, mpz_class, std::size_t>;
  std::map<Key, ExtremalRecord> best;
  for (const ExtremalRecord& r : records) {
    const FieldCtx& ctx = r.witness.ctx();
    Key key{ctx.is_rational(), ctx.is_rational() ? mpz_class(0) : ctx.modulus(), r.witness.size()};
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), r);
    } else if (record_better(r, it->second)) {
      it->second = r;
    }
  }
  std::vector<ExtremalRecord> out;
  for (auto& [k, r] : best) out.push_back(r);
  return out;
}

std::string records_to_csv(const std::vector<ExtremalRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const ExtremalRecord& r : records) {
    std::string witness;
    for (const std::string& e : r.witness.render()) {
      if (!witness.empty()) witness += ' ';
      witness += e;
    }
    os << field_label(r.witness.ctx()) << ',' << r.witness.size() << ',' << r.value << ','
       << (r.exponent ? r.exponent->lo_string(20) : "") << ','
       << (r.exponent ? r.exponent->hi_string(20) : "") << ',' << (r.certified_min ? "true" : "false")
       << ',' << witness << ',' << r.seed << '\n';
  }
  return os.str();
}

std::vector<ExtremalRecord> load_records_csv(std::string_view text) {
  std::vector<std::string> lines;
  for (std::string& l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    if (!l.empty()) lines.push_back(std::move(l));
  }
  if (lines.empty() || lines[0] != kCsvHeader) {
    throw Error(ErrorCode::kParseError, "missing CSV header");
  }
  std::vector<ExtremalRecord> out;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cols = split(lines[row], ',');
    const std::string where = "row " + std::to_string(row) + ": ";
    if (cols.size() != 8) throw Error(ErrorCode::kParseError, where + "expected 8 columns");
    const FieldCtx ctx = cols[0] == "Q" ? FieldCtx::rational() : FieldCtx::prime_field(mpz_class(cols[0]));
    const u64 n = parse_u64(cols[1], "n");
    const u64 value = parse_u64(cols[2], "value");
    if (cols[5] != "true" && cols[5] != "false") throw Error(ErrorCode::kParseError, where + "bad certified flag");
    std::vector<std::string> elems;
    for (std::string& e : split(cols[6], ' ')) {
      if (!e.empty()) elems.push_back(std::move(e));
    }
    FSet witness = FSet::parse(ctx, elems);
    if (witness.size() != n || elems.size() != n) {
      throw Error(ErrorCode::kWitnessFailure, where + "witness does not have n distinct elements");
    }
    const u64 actual = expander_set(witness, witness).size();
    if (actual != value) {
      throw Error(ErrorCode::kWitnessFailure, where + "|A(A+1)| is " + std::to_string(actual) +
                                                  ", file says " + std::to_string(value));
    }
    out.push_back(ExtremalRecord{std::move(witness), value, exponent_interval(value, n), cols[5] == "true",
                                 parse_u64(cols[7], "seed")});
  }
  return out;
}

}  // namespace expanderlab
