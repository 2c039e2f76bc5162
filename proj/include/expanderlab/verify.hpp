#ifndef EXPANDERLAB_VERIFY_HPP_
#define EXPANDERLAB_VERIFY_HPP_

#include <gmpxx.h>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expanderlab/fset.hpp"
#include "expanderlab/report.hpp"

namespace expanderlab {

struct RelationInfo {
  std::string key;
  std::string statement;
  bool constant_free = false;
  // Number of input sets the relation reads (A, then B, then C).
  int arity = 1;
};

// R1..R7 are constant-free; R8..R11c report slack only.
const std::vector<RelationInfo>& registry();
const RelationInfo& relation_info(std::string_view key);  // throws kUnknownRelation

struct CheckOptions {
  mpq_class epsilon = mpq_class(1, 64);
  // t for R7 and R9; 0 picks min(2, |A|, |B|).
  std::uint64_t t = 0;
  long start_precision = kDefaultStartPrecision;
  long precision_cap = kDefaultPrecisionCap;
};

// Inputs are (A), (A, B) or (A, B, C); a missing B defaults to A and a
// missing C to B. Throws kUnknownRelation, kSideConditionViolated.
InequalityReport check(std::string_view name, std::span<const FSet> inputs,
                       const CheckOptions& options = {});

// E_{1.5}(A)^2|B|^2 <= E_2(A,AB) E_3(A)^{2/3} E_3(B)^{1/3}, needing only
// 0 ∉ A, B. Decided on cubes: exactly when E_{1.5}(A) has a single surd
// kernel, otherwise with intervals refined up to the precision cap.
InequalityReport li_lemma(const FSet& a, const FSet& b, const CheckOptions& options = {});

struct PipelineStep {
  std::string description;
  InequalityReport report;
};

struct Quadruple {
  Elem alpha;
  Elem beta;
  Elem gamma;
  Elem delta;
};

enum class PipelineBranch { kRneqFp, kReqFp, kDegenerate, kReal };

std::string_view branch_name(PipelineBranch b);

struct PipelineTrace {
  std::string mode;  // "fp" or "real"
  std::vector<PipelineStep> steps;
  std::optional<Elem> b0;
  std::optional<FSet> a1;
  std::uint64_t n = 0;  // N; zero for the real pipeline
  std::optional<bool> r_a1_full;
  std::uint64_t r_a1_size = 0;
  std::optional<Elem> xi;
  std::optional<Quadruple> quadruple;
  PipelineBranch branch = PipelineBranch::kReal;
  // (element, |a(A+1) ∩ b0(A+1)|) for every a ∈ A, in canonical order.
  std::vector<std::pair<Elem, std::uint64_t>> intersection_counts;
};

inline const mpq_class kPipelineEpsilon{1, 64};

// Traces the finite field argument on A. Needs a prime field, |A| >= 3,
// 0, -1 ∉ A and |A|^2 < p. Throws kFieldMismatch, kSetTooSmall,
// kSideConditionViolated, kDensityViolated, kEpsilonOutOfRange (0 < ε < 1/16).
PipelineTrace finite_field_pipeline(const FSet& a, const mpq_class& epsilon = kPipelineEpsilon);

// Traces the real-line chain on A ⊂ Q with -1, 0, 1 ∉ A.
PipelineTrace real_pipeline(const FSet& a, const CheckOptions& options = {});

nlohmann::ordered_json trace_to_json(const PipelineTrace& trace);

bool any_verdict(std::span<const InequalityReport> reports, Verdict v);

}  // namespace expanderlab

#endif  // EXPANDERLAB_VERIFY_HPP_
