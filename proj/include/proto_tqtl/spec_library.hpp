#pragma once

#include "proto_tqtl/label.hpp"
#include "proto_tqtl/trace.hpp"
#include "proto_tqtl/tqtl/ast.hpp"
#include "proto_tqtl/tqtl/eval.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace proto_tqtl::specs {

struct SpecParams {
  /// The class the specification speaks for: Class(V) must equal it.
  Label target_class = Label::Fake;
  double similarity_ceiling = 0.4;
  double drift_bound = 0.1;
  std::int64_t window = 5;
  tqtl::ClassSource class_source = tqtl::ClassSource::Predicted;
  /// Build the key-frame formula exactly as printed, conjunctions and all.
  bool literal_phi1 = false;

  /// Throws InvariantError on out-of-range thresholds.
  void validate() const;
};

/// Key-frame: some frame t and same-class prototype p_k whose similarity at
/// t beats every opposite-class prototype at every interior frame t' >= t.
tqtl::Formula build_phi1(const SpecParams& params);

/// Non-relevance: opposite-class prototypes stay under the ceiling and move
/// less than the drift bound over the next `window` frames.
tqtl::Formula build_phi2(const SpecParams& params);

/// Relaxed non-relevance: phi2 without the drift clause.
tqtl::Formula build_phi3(const SpecParams& params);

/// Conjunction of the REAL and FAKE instances of a builder. Each instance is
/// vacuous on videos of the other class, so every trace is checked against
/// the instance for its own class.
tqtl::Formula for_both_classes(tqtl::Formula (*builder)(const SpecParams&), SpecParams params);

/// Resolves "phi1", "phi2" or "phi3" to the both-class formula.
std::optional<tqtl::Formula> builtin(const std::string& name, const SpecParams& params);

// ---------------------------------------------------------------------------

struct GroupStats {
  std::size_t total = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t inconclusive = 0;

  /// Percentage of SAT traces over all traces in the group; empty if none.
  std::optional<double> percent() const;
};

struct TraceResult {
  std::string video_id;
  Label ground_truth = Label::Real;
  Label predicted = Label::Real;
  tqtl::Robustness robustness = tqtl::Robustness::neg_inf();
  tqtl::Verdict verdict = tqtl::Verdict::Unsat;
};

/// Per-trace outcomes plus the three percentage rows: ground-truth FAKE
/// (+), ground-truth REAL (-), and all traces.
struct SatisfactionReport {
  std::vector<TraceResult> results;
  GroupStats positive;
  GroupStats negative;
  GroupStats all;
};

struct ReportOptions {
  tqtl::EvalOptions eval;
  unsigned jobs = 1;
};

/// Evaluates `spec` on every trace. Throws Error on an empty trace set or
/// when traces disagree on catalog size.
SatisfactionReport report(const tqtl::Formula& spec, std::span<const Trace> traces,
                          const ReportOptions& options = {});

/// Three-row text block: "(+)", "(-)", "all", with "n/a" for empty groups.
std::string format_table(const SatisfactionReport& report, const std::string& column);

} // namespace proto_tqtl::specs
