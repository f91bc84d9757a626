#include "proto_tqtl/tqtl/eval.hpp"

#include "proto_tqtl/error.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace proto_tqtl::tqtl {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Robustness Robustness::finite(double v) {
  if (std::isnan(v)) throw EvalError("robustness is NaN");
  return Robustness(v);
}

bool Robustness::identical(Robustness other) const {
  return std::bit_cast<std::uint64_t>(value_) == std::bit_cast<std::uint64_t>(other.value_);
}

std::string Robustness::to_string() const {
  if (is_pos_inf()) return "+inf";
  if (is_neg_inf()) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

// ---------------------------------------------------------------------------

Environment Environment::bind_time(std::string name, std::size_t frame) const {
  Environment next = *this;
  next.time_.emplace_back(std::move(name), frame);
  return next;
}

Environment Environment::bind_proto(std::string name, std::size_t proto) const {
  Environment next = *this;
  next.proto_.emplace_back(std::move(name), proto);
  return next;
}

namespace {

std::optional<std::size_t> lookup(const std::vector<std::pair<std::string, std::size_t>>& scope,
                                  std::string_view name) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
    if (it->first == name) return it->second;
  }
  return std::nullopt;
}

} // namespace

std::optional<std::size_t> Environment::time(std::string_view name) const { return lookup(time_, name); }
std::optional<std::size_t> Environment::proto(std::string_view name) const { return lookup(proto_, name); }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

Verdict verdict_of(Robustness r) {
  if (r > Robustness::finite(0.0)) return Verdict::Sat;
  if (r < Robustness::finite(0.0)) return Verdict::Unsat;
  return Verdict::Inconclusive;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t time_of(const Environment& env, const std::string& name) {
  auto v = env.time(name);
  if (!v) throw EvalError("unbound time variable '" + name + "'");
  return *v;
}

std::size_t proto_of(const Environment& env, const std::string& name, const Trace& trace) {
  auto v = env.proto(name);
  if (!v) throw EvalError("unbound prototype variable '" + name + "'");
  if (*v >= trace.num_prototypes()) throw EvalError("prototype index out of range for '" + name + "'");
  return *v;
}

Label video_class(const Trace& trace, const EvalOptions& options) {
  return options.class_source == ClassSource::Predicted ? trace.predicted : trace.ground_truth;
}

double score_value(const ScoreExpr& e, const Trace& trace, const Environment& env) {
  return std::visit(overloaded{
                        [&](const expr::Sim& s) {
                          const std::size_t frame = time_of(env, s.time_var);
                          const std::size_t proto = proto_of(env, s.proto_var, trace);
                          return trace.similarity(frame, proto);
                        },
                        [](const expr::Const& c) { return c.value; },
                        [&](const expr::Abs& a) { return std::fabs(score_value(*a.arg, trace, env)); },
                        [&](const expr::Sub& s) {
                          return score_value(*s.lhs, trace, env) - score_value(*s.rhs, trace, env);
                        },
                    },
                    e.node);
}

std::int64_t time_value(const TimeTerm& t, const Trace& trace, const Environment& env) {
  return std::visit(overloaded{
                        [&](const tterm::Var& v) { return static_cast<std::int64_t>(time_of(env, v.name)); },
                        [](const tterm::Int& i) { return i.value; },
                        [&](const tterm::End&) { return static_cast<std::int64_t>(trace.length()); },
                        [&](const tterm::VarPlus& v) {
                          return static_cast<std::int64_t>(time_of(env, v.name)) + v.offset;
                        },
                    },
                    t.node);
}

template <class T>
bool compare(T lhs, Comparison op, T rhs) {
  switch (op) {
    case Comparison::Lt: return lhs < rhs;
    case Comparison::Le: return lhs <= rhs;
    case Comparison::Gt: return lhs > rhs;
    case Comparison::Ge: return lhs >= rhs;
    case Comparison::Eq: return lhs == rhs;
    case Comparison::Ne: return lhs != rhs;
  }
  return false;
}

bool class_atom_holds(const node::ClassAtom& n, const Trace& trace, const Environment& env,
                      const EvalOptions& options) {
  return std::visit(overloaded{
                        [&](const node::ClassOfVideo& c) { return video_class(trace, options) == c.label; },
                        [&](const node::ProtoInClass& c) {
                          return trace.catalog[proto_of(env, c.proto_var, trace)].class_label == c.label;
                        },
                    },
                    n.atom);
}

/// Signed margin of `lhs op rhs`: positive when the comparison holds.
Robustness predicate_margin(double lhs, Comparison op, double rhs) {
  switch (op) {
    case Comparison::Gt:
    case Comparison::Ge: return Robustness::finite(lhs - rhs);
    case Comparison::Lt:
    case Comparison::Le: return Robustness::finite(rhs - lhs);
    case Comparison::Eq: return Robustness::finite(-std::fabs(lhs - rhs));
    case Comparison::Ne: return Robustness::finite(std::fabs(lhs - rhs));
  }
  return Robustness::neg_inf();
}

[[noreturn]] void not_lowered(const char* what) {
  throw EvalError(std::string("formula contains sugar node '") + what + "'; lower it first");
}

class Evaluator {
 public:
  Evaluator(const Trace& trace, const EvalOptions& options) : trace_(trace), options_(options) {}

  Robustness eval(const Formula& f, std::size_t i, const Environment& env) const {
    return std::visit(
        overloaded{
            [](const node::True&) { return Robustness::pos_inf(); },
            [&](const node::Predicate& n) {
              return predicate_margin(score_value(n.lhs, trace_, env), n.op,
                                      score_value(n.rhs, trace_, env));
            },
            [&](const node::ClassAtom& n) {
              return Robustness::from_bool(class_atom_holds(n, trace_, env, options_));
            },
            [&](const node::TimeConstraint& n) {
              return Robustness::from_bool(
                  compare(time_value(n.lhs, trace_, env), n.op, time_value(n.rhs, trace_, env)));
            },
            [&](const node::Not& n) { return -eval(*n.arg, i, env); },
            [&](const node::Or& n) { return max(eval(*n.lhs, i, env), eval(*n.rhs, i, env)); },
            [&](const node::Until& n) { return eval_until(*n.lhs, *n.rhs, i, env); },
            [&](const node::Freeze& n) { return eval(*n.body, i, env.bind_time(n.time_var, i)); },
            [&](const node::ExistsProto& n) {
              time_of(env, n.at_time_var);
              Robustness best = Robustness::neg_inf();
              for (std::size_t k = 0; k < trace_.num_prototypes(); ++k) {
                best = max(best, eval(*n.body, i, env.bind_proto(n.proto_var, k)));
                if (best.is_pos_inf()) break;
              }
              return best;
            },
            [](const node::And&) -> Robustness { not_lowered("and"); },
            [](const node::Implies&) -> Robustness { not_lowered("->"); },
            [](const node::Eventually&) -> Robustness { not_lowered("eventually"); },
            [](const node::Always&) -> Robustness { not_lowered("always"); },
            [](const node::ForallProto&) -> Robustness { not_lowered("forall"); },
        },
        f.node);
  }

 private:
  const Trace& trace_;
  const EvalOptions& options_;

  // max over j in [i, T) of min(rhs@j, min over k in [i, j) of lhs@k),
  // with the inner min carried forward.
  Robustness eval_until(const Formula& lhs, const Formula& rhs, std::size_t i,
                        const Environment& env) const {
    Robustness best = Robustness::neg_inf();
    Robustness prefix = Robustness::pos_inf();
    for (std::size_t j = i; j < trace_.length(); ++j) {
      best = max(best, min(eval(rhs, j, env), prefix));
      if (best.is_pos_inf()) break;
      prefix = min(prefix, eval(lhs, j, env));
      if (prefix.is_neg_inf()) break; // every later candidate is -inf
    }
    return best;
  }
};

} // namespace

Robustness evaluate(const Formula& f, const Trace& trace, std::size_t frame, const Environment& env,
                    const EvalOptions& options) {
  if (frame >= trace.length()) {
    throw EvalError("frame " + std::to_string(frame) + " outside trace of length " +
                    std::to_string(trace.length()));
  }
  return Evaluator(trace, options).eval(f, frame, env);
}

Robustness robustness(const Formula& f, const Trace& trace, const EvalOptions& options) {
  return evaluate(lower(f), trace, 0, Environment{}, options);
}

Verdict satisfies(const Formula& f, const Trace& trace, const EvalOptions& options) {
  return verdict_of(robustness(f, trace, options));
}

// ---------------------------------------------------------------------------
// Boolean oracle. Deliberately naive: no early exits, no carried minima.

namespace {

class Oracle {
 public:
  Oracle(const Trace& trace, const EvalOptions& options) : trace_(trace), options_(options) {}

  bool holds(const Formula& f, std::size_t i, const Environment& env) const {
    return std::visit(
        overloaded{
            [](const node::True&) { return true; },
            [&](const node::Predicate& n) {
              return compare(score_value(n.lhs, trace_, env), n.op, score_value(n.rhs, trace_, env));
            },
            [&](const node::ClassAtom& n) { return class_atom_holds(n, trace_, env, options_); },
            [&](const node::TimeConstraint& n) {
              return compare(time_value(n.lhs, trace_, env), n.op, time_value(n.rhs, trace_, env));
            },
            [&](const node::Not& n) { return !holds(*n.arg, i, env); },
            [&](const node::Or& n) {
              const bool a = holds(*n.lhs, i, env);
              const bool b = holds(*n.rhs, i, env);
              return a || b;
            },
            [&](const node::Until& n) {
              for (std::size_t j = i; j < trace_.length(); ++j) {
                bool prefix = true;
                for (std::size_t k = i; k < j; ++k) prefix = prefix && holds(*n.lhs, k, env);
                if (holds(*n.rhs, j, env) && prefix) return true;
              }
              return false;
            },
            [&](const node::Freeze& n) { return holds(*n.body, i, env.bind_time(n.time_var, i)); },
            [&](const node::ExistsProto& n) {
              time_of(env, n.at_time_var);
              bool any = false;
              for (std::size_t k = 0; k < trace_.num_prototypes(); ++k) {
                any = holds(*n.body, i, env.bind_proto(n.proto_var, k)) || any;
              }
              return any;
            },
            [](const node::And&) -> bool { not_lowered("and"); },
            [](const node::Implies&) -> bool { not_lowered("->"); },
            [](const node::Eventually&) -> bool { not_lowered("eventually"); },
            [](const node::Always&) -> bool { not_lowered("always"); },
            [](const node::ForallProto&) -> bool { not_lowered("forall"); },
        },
        f.node);
  }

 private:
  const Trace& trace_;
  const EvalOptions& options_;
};

} // namespace

bool boolean_oracle(const Formula& f, const Trace& trace, std::size_t frame, const Environment& env,
                    const EvalOptions& options) {
  if (frame >= trace.length()) throw EvalError("frame outside trace");
  return Oracle(trace, options).holds(f, frame, env);
}

} // namespace proto_tqtl::tqtl
