#pragma once

#include "proto_tqtl/trace.hpp"
#include "proto_tqtl/tqtl/ast.hpp"
#include "proto_tqtl/tqtl/robustness.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace proto_tqtl::tqtl {

/// Which trace label `class() == ...` reads.
enum class ClassSource { Predicted, GroundTruth };

struct EvalOptions {
  ClassSource class_source = ClassSource::Predicted;
};

/// Variable bindings. Updates return a new environment; the receiver is
/// never modified. Lookups see the most recent binding of a name.
class Environment {
 public:
  Environment bind_time(std::string name, std::size_t frame) const;
  Environment bind_proto(std::string name, std::size_t proto) const;

  std::optional<std::size_t> time(std::string_view name) const;
  std::optional<std::size_t> proto(std::string_view name) const;

 private:
  std::vector<std::pair<std::string, std::size_t>> time_;
  std::vector<std::pair<std::string, std::size_t>> proto_;
};

/// Quantitative semantics of a core formula at `frame`.
///
/// Throws EvalError on sugar nodes, on unbound variables and when `frame`
/// is outside the trace.
Robustness evaluate(const Formula& f, const Trace& trace, std::size_t frame, const Environment& env,
                    const EvalOptions& options = {});

/// Lowers `f` and evaluates it at frame 0 in the empty environment.
Robustness robustness(const Formula& f, const Trace& trace, const EvalOptions& options = {});

enum class Verdict { Sat, Unsat, Inconclusive };

std::string_view to_string(Verdict v);

/// Sat iff > 0, Unsat iff < 0, Inconclusive iff exactly 0.
Verdict verdict_of(Robustness r);

Verdict satisfies(const Formula& f, const Trace& trace, const EvalOptions& options = {});

/// Independent boolean semantics by direct enumeration, for cross-checking
/// `evaluate` on small traces. Requires a core formula.
bool boolean_oracle(const Formula& f, const Trace& trace, std::size_t frame, const Environment& env,
                    const EvalOptions& options = {});

} // namespace proto_tqtl::tqtl
