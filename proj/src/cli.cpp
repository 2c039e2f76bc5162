#include "expanderlab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "expanderlab/energy.hpp"
#include "expanderlab/report.hpp"
#include "expanderlab/search.hpp"
#include "expanderlab/verify.hpp"

namespace expanderlab {

namespace {

using json = nlohmann::ordered_json;
using u64 = std::uint64_t;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  f << content;
}

std::string element_text(const nlohmann::json& e) {
  if (e.is_number_integer()) return std::to_string(e.get<long long>());
  if (e.is_string()) return e.get<std::string>();
  throw Error(ErrorCode::kParseError, "elements must be integers or strings");
}

mpq_class parse_rational(const std::string& text, const char* what) {
  const FieldCtx q = FieldCtx::rational();
  try {
    return q.parse(text).value();
  } catch (const Error&) {
    throw Error(ErrorCode::kParseError, std::string("bad ") + what + " '" + text + "'");
  }
}

long resolve_precision_cap(long flag) {
  if (flag != 0) {
    if (flag < kDefaultStartPrecision) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--precision-cap must be >= " + std::to_string(kDefaultStartPrecision));
    }
    return flag;
  }
  if (const char* env = std::getenv("EXPANDERLAB_PRECISION_CAP"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < kDefaultStartPrecision) {
      throw Error(ErrorCode::kInvalidArgument, std::string("EXPANDERLAB_PRECISION_CAP must be an integer >= ") +
                                                   std::to_string(kDefaultStartPrecision));
    }
    return v;
  }
  return kDefaultPrecisionCap;
}

// Exit code from verdicts: Fails beats Inconclusive.
int verdict_exit(const std::vector<InequalityReport>& reports) {
  if (any_verdict(reports, Verdict::kFails)) return kExitFails;
  if (any_verdict(reports, Verdict::kInconclusive)) return kExitInconclusive;
  return kExitOk;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Manifest next to an output, or at an explicit path.
struct ManifestSpec {
  std::string path;
  std::string command;
  std::vector<std::string> argv;  // everything after the program name
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json config = json::object();
};

void write_manifest(const ManifestSpec& m) {
  if (m.path.empty()) return;
  json j;
  j["tool"] = "expanderlab";
  j["version"] = std::string(kToolVersion);
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["config"] = m.config;
  std::ofstream f(m.path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + m.path);
  f << dump(j);
}

std::string manifest_path(const std::string& explicit_path, const std::string& output) {
  if (!explicit_path.empty()) return explicit_path;
  return output.empty() ? std::string() : output + ".manifest.json";
}

// Random sets for batch runs. Elements -1, 0, 1 never appear so every
// registry side condition holds; sizes are uniform in [1, max_size].
class SetGenerator {
 public:
  SetGenerator(FieldCtx ctx, u64 seed, std::size_t max_size)
      : ctx_(std::move(ctx)), rng_(seed), max_size_(max_size) {}

  FSet next() {
    std::size_t target = 1 + below(max_size_);
    if (ctx_.is_prime_field()) {
      const u64 p = *ctx_.small_modulus();
      if (p <= 3) throw Error(ErrorCode::kInvalidArgument, "F_" + std::to_string(p) + " has no element outside {-1, 0, 1}");
      target = std::min<std::size_t>(target, p - 3);
    }
    std::vector<Elem> elems;
    while (elems.size() < target) {
      Elem e = draw();
      if (std::find(elems.begin(), elems.end(), e) == elems.end()) elems.push_back(std::move(e));
    }
    return FSet(ctx_, std::move(elems));
  }

 private:
  u64 below(u64 n) {
    const u64 threshold = (0 - n) % n;
    for (;;) {
      const u64 r = rng_();
      if (r >= threshold) return r % n;
    }
  }

  Elem draw() {
    for (;;) {
      Elem e;
      if (ctx_.is_prime_field()) {
        e = ctx_.from_mpz(mpz_class(static_cast<unsigned long>(below(*ctx_.small_modulus()))));
      } else {
        const long num = static_cast<long>(below(61)) - 30;
        const long den = static_cast<long>(below(4)) + 1;
        e = ctx_.from_fraction(num, den);
      }
      if (e != ctx_.zero() && e != ctx_.one() && e != ctx_.neg(ctx_.one())) return e;
    }
  }

  FieldCtx ctx_;
  std::mt19937_64 rng_;
  std::size_t max_size_;
};

struct Options {
  // shared
  std::string output;
  std::string manifest;
  std::string epsilon = "1/64";
  long precision_cap = 0;
  // verify
  std::vector<std::string> files;
  std::vector<std::string> relations;
  bool all = false;
  u64 random = 0;
  u64 seed = 0;
  std::string p = "101";
  std::string field = "fp";
  std::size_t max_size = 16;
  u64 t = 0;
  // pipeline
  std::string mode;
  // search
  std::string range;
  std::vector<std::size_t> ns{2};
  std::string search_mode = "exhaustive";
  u64 budget = 5'000'000;
  u64 iterations = 2000;
  std::size_t restarts = 20;
  unsigned threads = 0;
  bool admit_degenerate = false;
  bool no_density_guard = false;
  // energy
  std::vector<std::string> alphas{"2"};
  std::string kind = "ratio";
};

CheckOptions check_options(const Options& o) {
  CheckOptions c;
  c.epsilon = parse_rational(o.epsilon, "epsilon");
  c.t = o.t;
  c.precision_cap = resolve_precision_cap(o.precision_cap);
  return c;
}

std::vector<FSet> load_files(const std::vector<std::string>& files) {
  std::vector<FSet> sets;
  for (const auto& f : files) sets.push_back(load_set_file(f));
  return sets;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += sep;
    s += p;
  }
  return s;
}

int cmd_verify(const Options& o, ManifestSpec& m, std::ostream& out, std::ostream& err) {
  std::vector<std::string> relations;
  if (o.all) {
    for (const auto& info : registry()) relations.push_back(info.key);
  } else {
    relations = o.relations;
  }
  if (relations.empty()) throw Error(ErrorCode::kInvalidArgument, "give --relation or --all");
  for (const auto& r : relations) relation_info(r);
  if (o.random == 0 && o.files.empty()) throw Error(ErrorCode::kInvalidArgument, "give set files or --random N");
  if (o.random != 0 && !o.files.empty()) throw Error(ErrorCode::kInvalidArgument, "set files and --random exclude each other");
  if (o.files.size() > 3) throw Error(ErrorCode::kInvalidArgument, "at most three set files (A, B, C)");
  const CheckOptions co = check_options(o);

  struct Instance {
    std::vector<FSet> sets;
    std::string label;
  };
  std::vector<Instance> instances;
  if (o.random == 0) {
    instances.push_back({load_files(o.files), join(o.files, ";")});
  } else {
    if (o.max_size == 0) throw Error(ErrorCode::kInvalidArgument, "--max-size must be positive");
    FieldCtx ctx = FieldCtx::rational();
    if (o.field == "fp") {
      ctx = FieldCtx::prime_field(mpz_class(o.p));
      if (!ctx.small_modulus()) throw Error(ErrorCode::kInvalidArgument, "--random needs p < 2^32");
    } else if (o.field != "q") {
      throw Error(ErrorCode::kInvalidArgument, "--field is fp or q");
    }
    SetGenerator gen(ctx, o.seed, o.max_size);
    for (u64 k = 0; k < o.random; ++k) {
      std::vector<FSet> sets;
      for (int i = 0; i < 3; ++i) sets.push_back(gen.next());
      instances.push_back({std::move(sets), "random:" + std::to_string(o.seed) + ":" + std::to_string(k)});
    }
  }

  json reports = json::array();
  json errors = json::array();
  std::vector<InequalityReport> all_reports;
  int error_exit = kExitOk;
  for (const Instance& inst : instances) {
    for (const auto& rel : relations) {
      try {
        InequalityReport r = check(rel, inst.sets, co);
        json j = report_to_json(r);
        j["inputs_path"] = inst.label;
        reports.push_back(std::move(j));
        all_reports.push_back(std::move(r));
      } catch (const Error& e) {
        errors.push_back({{"relation", rel},
                          {"inputs_path", inst.label},
                          {"error", std::string(error_code_name(e.code()))},
                          {"message", e.what()}});
        err << rel << " on " << inst.label << ": " << e.what() << "\n";
        error_exit = std::max(error_exit, exit_code_for(e.code()));
      }
    }
  }
  json doc;
  doc["reports"] = std::move(reports);
  doc["errors"] = std::move(errors);
  write_output(o.output, dump(doc), out);

  m.inputs = o.files;
  m.config = {{"relations", relations},
              {"epsilon", render_rational(co.epsilon)},
              {"t", co.t},
              {"precision_cap", co.precision_cap},
              {"random", o.random},
              {"seed", o.seed},
              {"field", o.field},
              {"p", o.p},
              {"max_size", o.max_size}};

  if (error_exit != kExitOk) return error_exit;
  return verdict_exit(all_reports);
}

int cmd_pipeline(const Options& o, ManifestSpec& m, std::ostream& out) {
  if (o.files.size() != 1) throw Error(ErrorCode::kInvalidArgument, "pipeline takes exactly one set file");
  const FSet a = load_set_file(o.files[0]);
  std::string mode = o.mode;
  if (mode.empty()) mode = a.ctx().is_prime_field() ? "fp" : "real";
  CheckOptions co = check_options(o);
  PipelineTrace trace;
  if (mode == "fp") {
    trace = finite_field_pipeline(a, co.epsilon);
  } else if (mode == "real") {
    if (!a.ctx().is_rational()) throw Error(ErrorCode::kFieldMismatch, "real mode needs a rational set");
    trace = real_pipeline(a, co);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "--mode is fp or real");
  }
  json doc = trace_to_json(trace);
  doc["inputs_path"] = o.files[0];
  write_output(o.output, dump(doc), out);

  m.inputs = o.files;
  m.config = {{"mode", mode}, {"epsilon", render_rational(co.epsilon)}, {"precision_cap", co.precision_cap}};

  std::vector<InequalityReport> reports;
  for (const auto& s : trace.steps) reports.push_back(s.report);
  return verdict_exit(reports);
}

std::pair<long, long> parse_range(const std::string& text) {
  const auto colon = text.find(':', text.empty() ? 0 : 1);
  if (colon == std::string::npos) throw Error(ErrorCode::kParseError, "range must be LO:HI");
  try {
    std::size_t u1 = 0, u2 = 0;
    const std::string lo_s = text.substr(0, colon);
    const std::string hi_s = text.substr(colon + 1);
    const long lo = std::stol(lo_s, &u1);
    const long hi = std::stol(hi_s, &u2);
    if (u1 != lo_s.size() || u2 != hi_s.size()) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, "range must be LO:HI, got '" + text + "'");
  }
}

int cmd_search(const Options& o, const std::vector<std::string>& given, ManifestSpec& m, std::ostream& out) {
  const bool has_p = std::find(given.begin(), given.end(), "p") != given.end();
  const bool has_range = !o.range.empty();
  if (has_p == has_range) throw Error(ErrorCode::kInvalidArgument, "give exactly one of --p and --rational-range");
  SearchConfig cfg;
  if (has_p) {
    cfg.ctx = FieldCtx::prime_field(mpz_class(o.p));
  } else {
    cfg.ctx = FieldCtx::rational();
    std::tie(cfg.range_lo, cfg.range_hi) = parse_range(o.range);
  }
  cfg.mode = parse_search_mode(o.search_mode);
  cfg.seed = o.seed;
  cfg.budget = o.budget;
  cfg.iteration_cap = o.iterations;
  cfg.restarts = o.restarts;
  cfg.admit_degenerate = o.admit_degenerate;
  cfg.density_guard = !o.no_density_guard;
  cfg.threads = o.threads != 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());

  std::vector<ExtremalRecord> records;
  for (std::size_t n : o.ns) {
    cfg.n = n;
    records.push_back(run_search(cfg));
  }
  write_output(o.output, records_to_csv(exponent_table(records)), out);

  // Thread count never changes the output, so it stays out of the manifest config.
  m.config = {{"field", has_p ? "fp" : "q"},
              {"p", has_p ? o.p : ""},
              {"rational_range", o.range},
              {"n", o.ns},
              {"mode", o.search_mode},
              {"seed", o.seed},
              {"budget", o.budget},
              {"iterations", o.iterations},
              {"restarts", o.restarts},
              {"admit_degenerate", o.admit_degenerate},
              {"density_guard", cfg.density_guard}};
  return kExitOk;
}

HistogramKind parse_kind(const std::string& s) {
  if (s == "ratio") return HistogramKind::kRatio;
  if (s == "product") return HistogramKind::kProduct;
  if (s == "additive") return HistogramKind::kAdditiveShift;
  throw Error(ErrorCode::kInvalidArgument, "--kind is ratio, product or additive");
}

int cmd_energy(const Options& o, ManifestSpec& m, std::ostream& out) {
  if (o.files.empty() || o.files.size() > 2) throw Error(ErrorCode::kInvalidArgument, "energy takes one or two set files");
  const std::vector<FSet> sets = load_files(o.files);
  const FSet& a = sets[0];
  const FSet& b = sets.size() > 1 ? sets[1] : sets[0];
  require_same_ctx(a, b);
  const HistogramKind kind = parse_kind(o.kind);
  const long cap = resolve_precision_cap(o.precision_cap);
  const MultiplicityHistogram hist = histogram(a, b, kind);

  json doc;
  doc["a"] = set_to_json(a);
  doc["b"] = set_to_json(b);
  doc["kind"] = std::string(histogram_kind_name(kind));
  doc["total_support"] = hist.total_support;
  doc["pair_count"] = hist.pair_count();
  json bins = json::array();
  for (const auto& [mult, count] : hist.bins) bins.push_back({mult, count});
  doc["histogram"] = std::move(bins);
  json energies = json::array();
  for (const auto& text : o.alphas) {
    const mpq_class alpha = parse_rational(text, "alpha");
    if (alpha < 1) throw Error(ErrorCode::kInvalidArgument, "alpha must be at least 1");
    const EnergyValue ev = energy(hist, alpha, EnergyOptions{kDefaultStartPrecision, cap, 64});
    json e;
    e["alpha"] = render_rational(alpha);
    if (ev.exact) e["exact"] = ev.exact->get_str();
    e["lo"] = ev.enclosure.lo_string();
    e["hi"] = ev.enclosure.hi_string();
    e["precision_bits"] = ev.precision_bits;
    energies.push_back(std::move(e));
  }
  doc["energies"] = std::move(energies);
  write_output(o.output, dump(doc), out);

  m.inputs = o.files;
  m.config = {{"kind", o.kind}, {"alpha", o.alphas}, {"precision_cap", cap}};
  return kExitOk;
}

int cmd_replay(const std::string& path, std::ostream& out, std::ostream& err) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("argv") || !j["argv"].is_array()) {
    throw Error(ErrorCode::kParseError, path + " is not a manifest");
  }
  std::vector<std::string> argv{"expanderlab"};
  for (const auto& a : j["argv"]) {
    if (!a.is_string()) throw Error(ErrorCode::kParseError, "manifest argv must hold strings");
    argv.push_back(a.get<std::string>());
  }
  if (argv.size() < 2 || argv[1] == "replay") throw Error(ErrorCode::kParseError, "manifest has no replayable command");
  return run_cli(argv, out, err);
}

}  // namespace

FSet set_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("field") || !j["field"].is_string() || !j.contains("elements") ||
      !j["elements"].is_array()) {
    throw Error(ErrorCode::kParseError, "set JSON needs \"field\" and an \"elements\" array");
  }
  const std::string field = j["field"].get<std::string>();
  FieldCtx ctx = FieldCtx::rational();
  if (field == "fp") {
    if (!j.contains("p")) throw Error(ErrorCode::kMissingModulus, "fp set without \"p\"");
    ctx = FieldCtx::prime_field(mpz_class(element_text(j["p"])));
  } else if (field != "q") {
    throw Error(ErrorCode::kParseError, "field must be \"fp\" or \"q\"");
  }
  std::vector<std::string> texts;
  for (const auto& e : j["elements"]) texts.push_back(element_text(e));
  return FSet::parse(ctx, texts);
}

FSet load_set_file(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParseError, path + " is not valid JSON");
  try {
    return set_from_json(j);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::kParseError, path + ": bad modulus");
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBudgetExceeded: return kExitBudget;
    case ErrorCode::kPrecisionCapExceeded: return kExitInconclusive;
    default: return kExitUsage;
  }
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact checks and searches for the expander A(A+1)", "expanderlab"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", o.output, "Output path (stdout when omitted)");
    sub->add_option("--manifest", o.manifest, "Manifest path (default: OUTPUT.manifest.json)");
  };
  auto add_precision = [&](CLI::App* sub) {
    sub->add_option("--precision-cap", o.precision_cap, "Interval precision cap in bits");
  };

  CLI::App* verify = app.add_subcommand("verify", "Check registry relations on set files or random instances");
  verify->add_option("files", o.files, "Set files A [B [C]]");
  verify->add_option("--relation", o.relations, "Relation keys")->delimiter(',');
  verify->add_flag("--all", o.all, "Every registry relation");
  verify->add_option("--random", o.random, "Generate N random instances instead of reading files");
  verify->add_option("--seed", o.seed, "Generator seed (mt19937_64)");
  verify->add_option("--p", o.p, "Prime for generated instances");
  verify->add_option("--field", o.field, "fp or q for generated instances");
  verify->add_option("--max-size", o.max_size, "Largest generated set");
  verify->add_option("--epsilon", o.epsilon, "Epsilon for the popular-ratio relation");
  verify->add_option("--t", o.t, "Richness threshold t (0 picks min(2,|A|,|B|))");
  add_precision(verify);
  add_common(verify);

  CLI::App* pipeline = app.add_subcommand("pipeline", "Trace the finite field or real-line argument");
  pipeline->add_option("files", o.files, "Set file")->required();
  pipeline->add_option("--mode", o.mode, "fp or real (default from the field)");
  pipeline->add_option("--epsilon", o.epsilon, "Covering epsilon, 0 < eps < 1/16");
  add_precision(pipeline);
  add_common(pipeline);

  CLI::App* search = app.add_subcommand("search", "Search for small |A(A+1)|");
  search->add_option("--p", o.p, "Prime modulus");
  search->add_option("--rational-range", o.range, "Integer universe LO:HI in Q");
  search->add_option("--n", o.ns, "Set sizes")->delimiter(',');
  search->add_option("--mode", o.search_mode, "exhaustive, hillclimb or anneal");
  search->add_option("--seed", o.seed, "Seed for the stochastic modes");
  search->add_option("--budget", o.budget, "Largest candidate count for exhaustive mode");
  search->add_option("--iterations", o.iterations, "Moves per restart");
  search->add_option("--restarts", o.restarts, "Restarts for the stochastic modes");
  search->add_option("--threads", o.threads, "Worker threads (default: available cores)");
  search->add_flag("--admit-degenerate", o.admit_degenerate, "Allow 0 and -1 in candidate sets");
  search->add_flag("--no-density-guard", o.no_density_guard, "Allow |A|^2 >= p");
  add_common(search);

  CLI::App* energy_cmd = app.add_subcommand("energy", "Multiplicity histogram and energies of (A, B)");
  energy_cmd->add_option("files", o.files, "Set files A [B]")->required();
  energy_cmd->add_option("--alpha", o.alphas, "Energy exponents, e.g. 2,3/2")->delimiter(',');
  energy_cmd->add_option("--kind", o.kind, "ratio, product or additive");
  add_precision(energy_cmd);
  add_common(energy_cmd);

  std::string replay_path;
  CLI::App* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "Manifest file")->required();

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  ManifestSpec m;
  m.argv.assign(argv.begin() + 1, argv.end());
  try {
    int code = kExitOk;
    if (verify->parsed()) {
      m.command = "verify";
      code = cmd_verify(o, m, out, err);
    } else if (pipeline->parsed()) {
      m.command = "pipeline";
      code = cmd_pipeline(o, m, out);
    } else if (search->parsed()) {
      m.command = "search";
      std::vector<std::string> given;
      if (search->count("--p") > 0) given.push_back("p");
      code = cmd_search(o, given, m, out);
    } else if (energy_cmd->parsed()) {
      m.command = "energy";
      code = cmd_energy(o, m, out);
    } else {
      return cmd_replay(replay_path, out, err);
    }
    if (!o.output.empty()) m.outputs.push_back(o.output);
    m.path = manifest_path(o.manifest, o.output);
    write_manifest(m);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: malformed number\n";
    return kExitUsage;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace expanderlab
