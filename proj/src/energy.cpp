#include "expanderlab/energy.hpp"

#include <algorithm>

#include "expanderlab/set_arith.hpp"

namespace expanderlab {

std::string_view histogram_kind_name(HistogramKind kind) {
  switch (kind) {
    case HistogramKind::kProduct: return "product";
    case HistogramKind::kRatio: return "ratio";
    case HistogramKind::kAdditiveShift: return "additive-shift";
  }
  return "?";
}

std::uint64_t MultiplicityHistogram::pair_count() const {
  std::uint64_t n = 0;
  for (const auto& [m, c] : bins) n += m * c;
  return n;
}

std::pair<MultiplicityHistogram, MultiplicityHistogram> MultiplicityHistogram::split(
    std::uint64_t delta) const {
  MultiplicityHistogram low = *this;
  MultiplicityHistogram high = *this;
  low.bins.clear();
  high.bins.clear();
  low.total_support = high.total_support = 0;
  for (const auto& bin : bins) {
    auto& side = bin.first <= delta ? low : high;
    side.bins.push_back(bin);
    side.total_support += bin.second;
  }
  return {std::move(low), std::move(high)};
}

namespace {

using u64 = std::uint64_t;

void require_no_zero(const FSet& a, const FSet& b) {
  if (a.contains_zero() || b.contains_zero()) {
    throw Error(ErrorCode::kZeroElementPresent, "0 must not lie in either set");
  }
}

SetOp op_for(HistogramKind kind) {
  switch (kind) {
    case HistogramKind::kProduct: return SetOp::kProd;
    case HistogramKind::kRatio: return SetOp::kRatio;
    case HistogramKind::kAdditiveShift: return SetOp::kDiff;
  }
  return SetOp::kDiff;
}

// Run-length counts of a sorted sequence.
template <typename T>
std::vector<std::pair<T, u64>> run_lengths(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<T, u64>> out;
  for (auto& v : values) {
    if (!out.empty() && out.back().first == v) {
      ++out.back().second;
    } else {
      out.emplace_back(std::move(v), 1);
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<Elem, u64>> multiplicities(const FSet& a, const FSet& b,
                                                 HistogramKind kind) {
  require_same_ctx(a, b);
  if (kind != HistogramKind::kAdditiveShift) require_no_zero(a, b);
  const FieldCtx& ctx = a.ctx();
  const SetOp op = op_for(kind);
  std::vector<std::pair<Elem, u64>> out;
  if (auto p = ctx.small_modulus()) {
    std::vector<u64> rw = b.words();
    if (op == SetOp::kRatio) {
      for (auto& w : rw) w = detail::inv_mod(w, *p);
    }
    std::vector<u64> vals;
    vals.reserve(a.size() * b.size());
    for (u64 x : a.words()) {
      for (u64 y : rw) {
        vals.push_back(op == SetOp::kDiff ? (x + *p - y) % *p : detail::mul_mod(x, y, *p));
      }
    }
    for (auto& [w, c] : run_lengths(std::move(vals))) {
      out.emplace_back(ctx.from_mpz(mpz_class(static_cast<unsigned long>(w))), c);
    }
    return out;
  }
  std::vector<Elem> vals;
  vals.reserve(a.size() * b.size());
  for (const Elem& x : a) {
    for (const Elem& y : b) {
      switch (op) {
        case SetOp::kProd: vals.push_back(ctx.mul(x, y)); break;
        case SetOp::kRatio: vals.push_back(ctx.div(x, y)); break;
        default: vals.push_back(ctx.sub(x, y)); break;
      }
    }
  }
  return run_lengths(std::move(vals));
}

MultiplicityHistogram histogram(const FSet& a, const FSet& b, HistogramKind kind) {
  MultiplicityHistogram h;
  h.kind = kind;
  h.left_size = a.size();
  h.right_size = b.size();
  std::vector<u64> ms;
  for (const auto& [x, m] : multiplicities(a, b, kind)) ms.push_back(m);
  h.total_support = ms.size();
  h.bins = run_lengths(std::move(ms));
  return h;
}

mpz_class energy_integer(const MultiplicityHistogram& hist, unsigned long alpha) {
  mpz_class total = 0;
  mpz_class term;
  for (const auto& [m, c] : hist.bins) {
    mpz_ui_pow_ui(term.get_mpz_t(), m, alpha);
    total += term * mpz_class(static_cast<unsigned long>(c));
  }
  return total;
}

mpz_class energy2(const MultiplicityHistogram& hist) { return energy_integer(hist, 2); }

std::pair<mpz_class, mpz_class> squarefree_decomposition(u64 m) {
  mpz_class square_root = 1;
  u64 kernel = 1;
  for (u64 f = 2; f * f <= m; ++f) {
    int e = 0;
    while (m % f == 0) {
      m /= f;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) square_root *= static_cast<unsigned long>(f);
    if (e % 2 == 1) kernel *= f;
  }
  kernel *= m;
  return {square_root, mpz_class(static_cast<unsigned long>(kernel))};
}

namespace {

void check_alpha(const mpq_class& alpha) {
  if (alpha < 1) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 1");
  if (!mpz_fits_ulong_p(alpha.get_num_mpz_t()) || !mpz_fits_ulong_p(alpha.get_den_mpz_t())) {
    throw Error(ErrorCode::kInvalidArgument, "alpha numerator/denominator too large");
  }
}

}  // namespace

Interval energy_at_precision(const MultiplicityHistogram& hist, const mpq_class& alpha,
                             long precision_bits) {
  check_alpha(alpha);
  const unsigned long num = alpha.get_num().get_ui();
  const unsigned long den = alpha.get_den().get_ui();
  Interval total(precision_bits);
  for (const auto& [m, c] : hist.bins) {
    Interval term = Interval::power(mpz_class(static_cast<unsigned long>(m)), num, den,
                                    precision_bits);
    total = total + term * Interval::from_mpz(mpz_class(static_cast<unsigned long>(c)),
                                              precision_bits);
  }
  return total;
}

EnergyValue energy(const MultiplicityHistogram& hist, const mpq_class& alpha,
                   const EnergyOptions& options) {
  check_alpha(alpha);
  EnergyValue v{alpha, std::nullopt, Interval(options.start_precision), options.start_precision,
                {}};
  if (alpha.get_den() == 1) {
    mpz_class exact = energy_integer(hist, alpha.get_num().get_ui());
    v.enclosure = Interval::from_mpz(exact, std::max<long>(options.start_precision,
                                                           mpz_sizeinbase(exact.get_mpz_t(), 2) + 2));
    v.exact = std::move(exact);
    return v;
  }
  if (alpha.get_den() == 2) {
    // m^(j/2) = m^((j-1)/2) · s · sqrt(k) where m = s^2 k.
    const unsigned long half = (alpha.get_num().get_ui() - 1) / 2;
    for (const auto& [m, c] : hist.bins) {
      auto [s, k] = squarefree_decomposition(m);
      mpz_class coeff;
      mpz_ui_pow_ui(coeff.get_mpz_t(), m, half);
      v.surd[k] += coeff * s * mpz_class(static_cast<unsigned long>(c));
    }
  }
  long prec = options.start_precision;
  Interval best = energy_at_precision(hist, alpha, prec);
  while (!best.relative_width_below(options.target_relative_bits)) {
    prec *= 2;
    if (prec > options.precision_cap) {
      throw Error(ErrorCode::kPrecisionCapExceeded,
                  "energy enclosure [" + best.lo_string() + ", " + best.hi_string() +
                      "] at cap " + std::to_string(options.precision_cap));
    }
    Interval next = energy_at_precision(hist, alpha, prec);
    best = best.intersect(next);
  }
  v.enclosure = std::move(best);
  v.precision_bits = prec;
  return v;
}

FSet rich_products(const FSet& a, const FSet& b, u64 t) {
  require_same_ctx(a, b);
  require_no_zero(a, b);
  if (t < 1 || t > std::min(a.size(), b.size())) {
    throw Error(ErrorCode::kTOutOfRange, "t = " + std::to_string(t) + " outside [1, min(|A|,|B|)]");
  }
  std::vector<Elem> out;
  for (auto& [x, m] : multiplicities(a, b, HistogramKind::kProduct)) {
    if (m >= t) out.push_back(std::move(x));
  }
  return FSet(a.ctx(), std::move(out));
}

mpz_class additive_energy(const FSet& a, const FSet& b) {
  // a + b = a' + b'  <=>  a - b' = a' - b.
  return energy2(histogram(a, b, HistogramKind::kAdditiveShift));
}

mpz_class twisted_energy(const FSet& a, const Elem& xi) {
  a.ctx().require_member(xi);
  if (xi.is_zero()) throw Error(ErrorCode::kZeroTwist, "twist must be nonzero");
  return additive_energy(a, dilate(a, xi));
}

}  // namespace expanderlab
