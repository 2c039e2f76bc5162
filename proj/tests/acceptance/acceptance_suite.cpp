// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "expanderlab/cli.hpp"
#include "expanderlab/constructions.hpp"
#include "expanderlab/energy.hpp"
#include "expanderlab/incidence.hpp"
#include "expanderlab/search.hpp"
#include "expanderlab/set_arith.hpp"
#include "expanderlab/verify.hpp"
#include "oracles.hpp"

using namespace expanderlab;
namespace fs = std::filesystem;

namespace {

// First problem found; empty when the criterion holds.
class Failures {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && first_.empty()) first_ = what;
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failed_ > 0) s << ", " << failed_ << " failed, first: " << first_;
    return s.str();
  }

 private:
  std::uint64_t checks_ = 0;
  std::uint64_t failed_ = 0;
  std::string first_;
};

std::string label(const std::vector<FSet>& sets) {
  std::string s;
  for (const FSet& f : sets) {
    s += "{";
    for (const auto& e : f.render()) s += e + " ";
    s += "} ";
  }
  return s;
}

bool finite(const Quantity& q) {
  return std::holds_alternative<mpq_class>(q) || std::get<Interval>(q).is_finite();
}

const std::vector<unsigned long>& small_primes() {
  static const std::vector<unsigned long> ps = [] {
    std::vector<unsigned long> out;
    for (unsigned long p = 7; p <= 101; ++p)
      if (oracle::is_prime_small(p)) out.push_back(p);
    return out;
  }();
  return ps;
}

// 1. R6 identity, exact equality.
void identity_suite(Failures& f) {
  oracle::Gen gen(1001);
  for (int i = 0; i < 1000; ++i) {
    const FieldCtx ctx = FieldCtx::prime_field(small_primes()[gen.below(small_primes().size())]);
    const std::size_t cap = std::min<std::size_t>(16, *ctx.small_modulus() - 1);
    const std::vector<FSet> ab{gen.fp_set(ctx, 1, cap, {0}), gen.fp_set(ctx, 1, cap, {0})};
    const InequalityReport r = check("R6", ab);
    f.check(r.verdict == Verdict::kHolds && std::get<mpq_class>(r.lhs) == std::get<mpq_class>(r.rhs),
            "R6 " + label(ab));
    std::uint64_t total = 0;
    const oracle::Arith k = oracle::arith_of(ab[0]);
    for (const auto& x : oracle::combine(k, oracle::values(ab[0]), oracle::values(ab[1]), oracle::Op::kRatio)) {
      total += oracle::ratio_mult(k, oracle::values(ab[0]), oracle::values(ab[1]), x);
    }
    f.check(total == ab[0].size() * ab[1].size(), "oracle sum " + label(ab));
  }
}

// 2. Constant-free inequalities.
void constant_free_suite(Failures& f) {
  oracle::Gen gen(1002);
  const std::vector<long> forbidden{-1, 0, 1};
  for (const char* key : {"R1", "R2", "R3", "R4"}) {
    for (int i = 0; i < 500; ++i) {
      std::vector<FSet> abc;
      if (i % 2 == 0) {
        for (int j = 0; j < 3; ++j) abc.push_back(gen.q_set(1, 12, forbidden));
      } else {
        const FieldCtx ctx = FieldCtx::prime_field(gen.prime_between(17, 1000));
        for (int j = 0; j < 3; ++j) abc.push_back(gen.fp_set(ctx, 1, 12, forbidden));
      }
      const InequalityReport r = check(key, abc);
      f.check(r.verdict == Verdict::kHolds, std::string(key) + " " + label(abc));
    }
  }
  for (int i = 0; i < 500; ++i) {
    const std::vector<FSet> ab{gen.q_set(1, 10, {-1, 0}), gen.q_set(1, 10, {0})};
    const InequalityReport r = check("R7", ab);
    f.check(r.verdict == Verdict::kHolds, "R7 " + label(ab));
  }
}

// 3. Li's lemma on rationals, certified at the default cap.
void li_suite(Failures& f) {
  oracle::Gen gen(1003);
  CheckOptions o;
  o.precision_cap = 4096;
  for (int i = 0; i < 300; ++i) {
    const std::vector<FSet> ab{gen.q_set(1, 10, {-1, 0, 1}), gen.q_set(1, 10, {-1, 0, 1})};
    const InequalityReport r = check("R5", ab, o);
    f.check(r.verdict == Verdict::kHolds, "R5 " + label(ab) + std::string(verdict_name(r.verdict)));
  }
}

// |S| recomputed from its definition.
std::uint64_t brute_s_size(const PairGraph& g) {
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

// 4. The injection has no collisions.
void injection_suite(Failures& f) {
  oracle::Gen gen(1004);
  const FieldCtx ctx = FieldCtx::prime_field(1009);
  for (int i = 0; i < 200; ++i) {
    const bool rational = i % 2 == 0;
    const FSet a = rational ? gen.q_set(1, 10, {0}) : gen.fp_set(ctx, 1, 10, {0});
    const FSet b = rational ? gen.q_set(1, 10, {0}) : gen.fp_set(ctx, 1, 10, {0});
    const mpq_class eps(1, 2 + gen.below(30));
    const PopularRatioResult pr = popular_ratio_graph(a, b, eps);
    try {
      const InjectionCertificate c = injection_witness(a, b, pr.graph, eps);
      f.check(c.bounded && c.s_size == brute_s_size(pr.graph), "injection " + label({a, b}));
    } catch (const Error& e) {
      f.check(false, std::string(e.what()) + " " + label({a, b}));
    }
  }
}

// 5. Greedy covering contract with per-step discard bounds.
void cover_suite(Failures& f) {
  oracle::Gen gen(1005);
  const FieldCtx ctx = FieldCtx::prime_field(101);
  for (const mpq_class& eps : {mpq_class(1, 16), mpq_class(1, 64)}) {
    // 1 - 2 sqrt(eps) is rational for both values.
    const mpq_class factor = eps == mpq_class(1, 16) ? mpq_class(1, 2) : mpq_class(3, 4);
    for (int i = 0; i < 200; ++i) {
      const bool rational = i % 3 == 0;
      const FSet a = rational ? gen.q_set(1, 10, {0}) : gen.fp_set(ctx, 1, 10, {0});
      const FSet b = rational ? gen.q_set(1, 10, {0}) : gen.fp_set(ctx, 1, 10, {0});
      const PairGraph g = popular_ratio_graph(a, b, eps).graph;
      const CoverSign sign = i % 2 ? CoverSign::kPlus : CoverSign::kMinus;
      const CoverResult r = greedy_cover(a, b, g, eps, sign);
      bool steps = true;
      for (const CoverStep& s : r.steps) steps = steps && s.guarantee_holds;
      const bool size =
          mpq_class(static_cast<unsigned long>(r.covered.size())) >= factor * static_cast<unsigned long>(a.size());
      FSet cover(a.ctx());
      const FSet signed_b = sign == CoverSign::kPlus ? b : negate(b);
      for (const Elem& t : r.translates) cover = cover.unite(translate(signed_b, t));
      f.check(steps && size && r.size_contract_holds && r.containment_holds && r.covered.is_subset_of(cover) &&
                  r.covered.is_subset_of(a),
              "cover " + label({a, b}));
    }
  }
}

// 6. Energies against quadruple counting; incidence counting methods agree.
void oracle_suite(Failures& f) {
  oracle::Gen gen(1006);
  const FieldCtx ctx = FieldCtx::prime_field(101);
  for (int i = 0; i < 100; ++i) {
    const bool rational = i % 2 == 0;
    const FSet a = rational ? gen.q_set(1, 12, {0}) : gen.fp_set(ctx, 1, 12, {0});
    const FSet b = rational ? gen.q_set(1, 12, {0}) : gen.fp_set(ctx, 1, 12, {0});
    const EnergyValue e = energy(histogram(a, b, HistogramKind::kRatio), mpq_class(2));
    const mpz_class quad = oracle::ratio_quadruples(oracle::arith_of(a), oracle::values(a), oracle::values(b));
    f.check(e.exact.has_value() && *e.exact == quad, "E2 " + label({a, b}));
  }
  const FieldCtx q = FieldCtx::rational();
  for (int i = 0; i < 100; ++i) {
    std::vector<Point> pts;
    const std::size_t np = 1 + gen.below(30);
    while (pts.size() < np) {
      Point p = make_point(mpq_class(gen.range(-5, 5), gen.range(1, 2)), mpq_class(gen.range(-8, 8)));
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    std::vector<Line> lines;
    const std::size_t nl = gen.below(25);
    while (lines.size() < nl) {
      Line l = gen.below(6) == 0 ? vertical_line(q.from_fraction(gen.range(-5, 5), gen.range(1, 2)))
                                 : line_through_slope(q.from_fraction(gen.range(-3, 3), gen.range(1, 2)),
                                                      q.from_int(gen.range(-5, 5)));
      if (std::find(lines.begin(), lines.end(), l) == lines.end()) lines.push_back(l);
    }
    const std::uint64_t per_line = count_incidences(pts, lines);
    std::uint64_t per_point = 0;
    for (const Point& p : pts) per_point += incidences_at(p, lines);
    std::vector<std::pair<mpq_class, mpq_class>> plain_pts;
    for (const Point& p : pts) plain_pts.emplace_back(p.x.value(), p.y.value());
    std::vector<oracle::PlainLine> plain_lines;
    for (const Line& l : lines) plain_lines.push_back({l.vertical, l.m.value(), l.c.value()});
    f.check(per_line == per_point && per_line == oracle::incidences(plain_pts, plain_lines), "incidences");
  }
}

// 7. Energies of the subgroup {1,2,4} in F_7.
void subgroup_suite(Failures& f) {
  const FSet sub = FSet::from_ints(FieldCtx::prime_field(7), {1, 2, 4});
  const auto h = histogram(sub, sub, HistogramKind::kRatio);
  const oracle::Arith k = oracle::arith_of(sub);
  const auto v = oracle::values(sub);
  f.check(energy2(h) == 27 && oracle::ratio_energy(k, v, v, 2) == 27, "E2");
  f.check(energy_integer(h, 3) == 81 && oracle::ratio_energy(k, v, v, 3) == 81, "E3");
  const EnergyValue e3 = energy(h, mpq_class(3));
  f.check(e3.exact.has_value() && *e3.exact == 81, "E3 via energy()");
}

// 8. Certified minimum for p = 7, n = 2 and its rediscovery.
void extremum_suite(Failures& f) {
  SearchConfig c;
  c.ctx = FieldCtx::prime_field(7);
  c.n = 2;
  const ExtremalRecord r = exhaustive_min(c);
  f.check(r.value == 3 && r.certified_min && r.witness == FSet::from_ints(c.ctx, {2, 4}), "exhaustive");

  // Enumeration oracle over pairs from {1,...,5}.
  const oracle::Arith k{7};
  std::uint64_t best = UINT64_MAX;
  for (long x = 1; x <= 5; ++x)
    for (long y = x + 1; y <= 5; ++y) {
      const oracle::Values s{mpq_class(x), mpq_class(y)};
      best = std::min<std::uint64_t>(best, oracle::expander(k, s, s).size());
    }
  f.check(best == 3, "enumeration oracle");

  for (SearchMode mode : {SearchMode::kHillclimb, SearchMode::kAnneal}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      c.mode = mode;
      c.seed = seed;
      f.check(stochastic_search(c).value == 3, std::string(search_mode_name(mode)) + " seed " + std::to_string(seed));
    }
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "expanderlab");
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

std::uint64_t brute_overlap(const FSet& a, const Elem& x, const Elem& y) {
  const oracle::Arith k = oracle::arith_of(a);
  std::set<mpq_class> sx, sy;
  for (const Elem& e : a) {
    sx.insert(k.mul(x.value(), k.add(e.value(), 1)));
    sy.insert(k.mul(y.value(), k.add(e.value(), 1)));
  }
  std::uint64_t n = 0;
  for (const auto& v : sx) n += sy.count(v);
  return n;
}

// 9. Byte-identical traces through manifest replay; dyadic membership.
void determinism_suite(Failures& f) {
  const fs::path dir = fs::temp_directory_path() / "expanderlab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> inputs{
      {"req.json", R"({"field": "fp", "p": 73, "elements": [8, 20, 25, 44, 49, 61, 70]})"},
      {"rneq.json", R"({"field": "fp", "p": 101, "elements": [1, 2, 3, 4, 5, 6, 7, 8, 9]})"},
      {"sparse.json", R"({"field": "fp", "p": 101, "elements": [2, 3, 5, 7, 11, 13, 17, 19]})"},
      {"real.json", R"({"field": "q", "elements": ["2", "3", "5/2", "7"]})"},
  };
  for (const auto& [name, content] : inputs) {
    const fs::path in = dir / name;
    std::ofstream(in) << content;
    const fs::path out = dir / (name + ".trace.json");
    const fs::path manifest = dir / (name + ".trace.json.manifest.json");
    f.check(cli({"pipeline", in.string(), "-o", out.string()}) == 0, "pipeline " + name);
    const std::string first = slurp(out);
    fs::remove(out);
    f.check(cli({"replay", manifest.string()}) == 0, "replay " + name);
    f.check(!first.empty() && slurp(out) == first, "replayed trace differs for " + name);

    const FSet a = load_set_file(in.string());
    const PipelineTrace t1 = a.ctx().is_prime_field() ? finite_field_pipeline(a) : real_pipeline(a);
    const PipelineTrace t2 = a.ctx().is_prime_field() ? finite_field_pipeline(a) : real_pipeline(a);
    f.check(trace_to_json(t1).dump() == trace_to_json(t2).dump(), "direct traces differ for " + name);
  }

  oracle::Gen gen(1009);
  std::vector<FSet> sets{load_set_file((dir / "req.json").string()), load_set_file((dir / "rneq.json").string()),
                         load_set_file((dir / "sparse.json").string())};
  const FieldCtx ctx = FieldCtx::prime_field(211);
  for (int i = 0; i < 20; ++i) sets.push_back(gen.fp_set(ctx, 3, 14, {0, -1}));
  for (const FSet& a : sets) {
    const PipelineTrace t = finite_field_pipeline(a);
    f.check(t.a1.has_value() && t.b0.has_value() && t.n > 0, "trace fields");
    if (!t.a1 || !t.b0) continue;
    for (const auto& [x, count] : t.intersection_counts) {
      f.check(count == brute_overlap(a, x, *t.b0), "intersection count");
    }
    for (const Elem& x : *t.a1) {
      const std::uint64_t c = brute_overlap(a, x, *t.b0);
      f.check(c >= t.n && c < 2 * t.n, "dyadic membership " + label({a}));
    }
  }
  fs::remove_all(dir);
}

// 10. Hidden-constant relations only report slack; the real chain.
void slack_suite(Failures& f) {
  oracle::Gen gen(1010);
  const FieldCtx ctx = FieldCtx::prime_field(1009);
  for (int i = 0; i < 100; ++i) {
    const bool rational = i % 2 == 0;
    const std::vector<FSet> ab{rational ? gen.q_set(1, 10, {-1, 0, 1}) : gen.fp_set(ctx, 1, 10, {-1, 0, 1}),
                               rational ? gen.q_set(1, 10, {-1, 0, 1}) : gen.fp_set(ctx, 1, 10, {-1, 0, 1})};
    for (const auto& info : registry()) {
      if (info.constant_free) continue;
      const InequalityReport r = check(info.key, ab);
      f.check(r.verdict == Verdict::kSlackOnly && finite(r.slack), info.key + " " + label(ab));
    }
  }
  for (int i = 0; i < 20; ++i) {
    const FSet a = gen.q_set(2, 8, {-1, 0, 1});
    const PipelineTrace t = real_pipeline(a);
    bool ok = !t.steps.empty() && t.steps.front().report.name == "R3" && t.steps.back().report.name == "R11b" &&
              t.steps.back().report.verdict == Verdict::kSlackOnly;
    for (const auto& s : t.steps) {
      const bool cf = relation_info(s.report.name).constant_free;
      ok = ok && finite(s.report.slack) &&
           s.report.verdict == (cf ? Verdict::kHolds : Verdict::kSlackOnly);
    }
    f.check(ok, "real pipeline " + label({a}));
  }
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Failures&)> run;
  double time_limit_s = 0;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "ratio multiplicities sum to |A||B| (1000 instances)", identity_suite, 60},
      {2, "R1-R4 and R7 hold (500 instances each)", constant_free_suite},
      {3, "R5 certified on rationals (300 instances)", li_suite},
      {4, "injection has no collisions (200 instances)", injection_suite},
      {5, "greedy cover contract for eps 1/16 and 1/64", cover_suite},
      {6, "energy and incidence oracles agree", oracle_suite},
      {7, "subgroup {1,2,4} in F_7 has E2 = 27, E3 = 81", subgroup_suite},
      {8, "certified minimum 3 at {2,4} in F_7, rediscovered", extremum_suite},
      {9, "pipeline traces replay byte-identically", determinism_suite},
      {10, "R8-R11 report slack only; real chain ends at R11b", slack_suite},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Failures f;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(f);
    } catch (const std::exception& e) {
      f.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0) {
      f.check(secs < c.time_limit_s, "took " + std::to_string(secs) + "s");
    }
    std::printf("%s [%d] %s: %s (%.2fs)\n", f.ok() ? "PASS" : "FAIL", c.id, c.name, f.summary().c_str(), secs);
    std::fflush(stdout);
    if (!f.ok()) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
