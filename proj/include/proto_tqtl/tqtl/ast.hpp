#pragma once

#include "proto_tqtl/label.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace proto_tqtl::tqtl {

/// Immutable, shareable owning pointer with value equality.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {} // NOLINT: implicit by intent

  const T& operator*() const noexcept { return *ptr_; }
  const T* operator->() const noexcept { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return a.ptr_ == b.ptr_ || *a.ptr_ == *b.ptr_; }

 private:
  std::shared_ptr<const T> ptr_;
};

enum class Comparison { Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(Comparison op);

// ---------------------------------------------------------------------------
// Score expressions: the real-valued side of a predicate.
// ---------------------------------------------------------------------------

struct ScoreExpr;

namespace expr {
/// S(t, p): similarity of prototype p at the frame bound to t.
struct Sim {
  std::string time_var;
  std::string proto_var;
  bool operator==(const Sim&) const = default;
};
struct Const {
  double value = 0.0;
  bool operator==(const Const&) const = default;
};
struct Abs {
  Box<ScoreExpr> arg;
  bool operator==(const Abs&) const = default;
};
struct Sub {
  Box<ScoreExpr> lhs;
  Box<ScoreExpr> rhs;
  bool operator==(const Sub&) const = default;
};
} // namespace expr

struct ScoreExpr {
  std::variant<expr::Sim, expr::Const, expr::Abs, expr::Sub> node;
  bool operator==(const ScoreExpr&) const = default;
};

// ---------------------------------------------------------------------------
// Time terms: the integer-valued side of a time constraint.
// ---------------------------------------------------------------------------

namespace tterm {
struct Var {
  std::string name;
  bool operator==(const Var&) const = default;
};
struct Int {
  std::int64_t value = 0;
  bool operator==(const Int&) const = default;
};
/// `T`, the trace length.
struct End {
  bool operator==(const End&) const = default;
};
/// `x + n` with n >= 0.
struct VarPlus {
  std::string name;
  std::int64_t offset = 0;
  bool operator==(const VarPlus&) const = default;
};
} // namespace tterm

struct TimeTerm {
  std::variant<tterm::Var, tterm::Int, tterm::End, tterm::VarPlus> node;
  bool operator==(const TimeTerm&) const = default;
};

// ---------------------------------------------------------------------------
// Formulas.
// ---------------------------------------------------------------------------

struct Formula;

namespace node {
struct True {
  bool operator==(const True&) const = default;
};
struct Predicate {
  ScoreExpr lhs;
  Comparison op = Comparison::Gt;
  ScoreExpr rhs;
  bool operator==(const Predicate&) const = default;
};
/// Class(V) == label.
struct ClassOfVideo {
  Label label = Label::Fake;
  bool operator==(const ClassOfVideo&) const = default;
};
/// p in P_label.
struct ProtoInClass {
  std::string proto_var;
  Label label = Label::Fake;
  bool operator==(const ProtoInClass&) const = default;
};
/// Frame-independent categorical atom.
struct ClassAtom {
  std::variant<ClassOfVideo, ProtoInClass> atom;
  bool operator==(const ClassAtom&) const = default;
};
struct TimeConstraint {
  TimeTerm lhs;
  Comparison op = Comparison::Le;
  TimeTerm rhs;
  bool operator==(const TimeConstraint&) const = default;
};
struct Not {
  Box<Formula> arg;
  bool operator==(const Not&) const = default;
};
struct Or {
  Box<Formula> lhs;
  Box<Formula> rhs;
  bool operator==(const Or&) const = default;
};
struct Until {
  Box<Formula> lhs;
  Box<Formula> rhs;
  bool operator==(const Until&) const = default;
};
/// x . phi: binds x to the current frame.
struct Freeze {
  std::string time_var;
  Box<Formula> body;
  bool operator==(const Freeze&) const = default;
};
/// exists p at x . phi
struct ExistsProto {
  std::string proto_var;
  std::string at_time_var;
  Box<Formula> body;
  bool operator==(const ExistsProto&) const = default;
};

// Sugar. `lower` rewrites these into the nodes above.
struct And {
  Box<Formula> lhs;
  Box<Formula> rhs;
  bool operator==(const And&) const = default;
};
struct Implies {
  Box<Formula> lhs;
  Box<Formula> rhs;
  bool operator==(const Implies&) const = default;
};
struct Eventually {
  Box<Formula> arg;
  bool operator==(const Eventually&) const = default;
};
struct Always {
  Box<Formula> arg;
  bool operator==(const Always&) const = default;
};
struct ForallProto {
  std::string proto_var;
  std::string at_time_var;
  Box<Formula> body;
  bool operator==(const ForallProto&) const = default;
};
} // namespace node

struct Formula {
  std::variant<node::True, node::Predicate, node::ClassAtom, node::TimeConstraint, node::Not, node::Or,
               node::Until, node::Freeze, node::ExistsProto, node::And, node::Implies, node::Eventually,
               node::Always, node::ForallProto>
      node;
  bool operator==(const Formula&) const = default;
};

// ---------------------------------------------------------------------------
// Construction helpers.
// ---------------------------------------------------------------------------

ScoreExpr sim(std::string time_var, std::string proto_var);
ScoreExpr constant(double v);
ScoreExpr abs_of(ScoreExpr e);
ScoreExpr minus(ScoreExpr lhs, ScoreExpr rhs);

TimeTerm tvar(std::string name);
TimeTerm tconst(std::int64_t n);
TimeTerm trace_end();
TimeTerm tplus(std::string name, std::int64_t n);

Formula top();
Formula predicate(ScoreExpr lhs, Comparison op, ScoreExpr rhs);
Formula time_cmp(TimeTerm lhs, Comparison op, TimeTerm rhs);
Formula class_is(Label label);
Formula in_class(std::string proto_var, Label label);
Formula lnot(Formula f);
Formula lor(Formula lhs, Formula rhs);
Formula land(Formula lhs, Formula rhs);
Formula implies(Formula lhs, Formula rhs);
Formula until(Formula lhs, Formula rhs);
Formula eventually(Formula f);
Formula always(Formula f);
Formula freeze(std::string time_var, Formula body);
Formula exists(std::string proto_var, std::string at_time_var, Formula body);
Formula forall(std::string proto_var, std::string at_time_var, Formula body);

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

/// True iff the formula contains only core nodes.
bool is_core(const Formula& f);

/// Rewrites every sugar node into the core grammar. Idempotent.
Formula lower(const Formula& f);

enum class VarKind { Time, Prototype };

struct ScopeError {
  std::string variable;
  VarKind kind = VarKind::Time;
  std::string path;

  std::string message() const;
  bool operator==(const ScopeError&) const = default;
};

/// Reports every unbound time or prototype variable occurrence. Binders
/// scope lexically; an inner binder of the same name shadows the outer one.
std::vector<ScopeError> scope_check(const Formula& f);

/// Canonical concrete syntax with minimal parentheses; re-parses to `f`.
std::string pretty_print(const Formula& f);
std::string pretty_print(const ScoreExpr& e);
std::string pretty_print(const TimeTerm& t);

} // namespace proto_tqtl::tqtl
