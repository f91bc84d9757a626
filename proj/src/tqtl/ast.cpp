#include "proto_tqtl/tqtl/ast.hpp"

#include <charconv>
#include <system_error>

namespace proto_tqtl::tqtl {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view to_string(Comparison op) {
  switch (op) {
    case Comparison::Lt: return "<";
    case Comparison::Le: return "<=";
    case Comparison::Gt: return ">";
    case Comparison::Ge: return ">=";
    case Comparison::Eq: return "==";
    case Comparison::Ne: return "!=";
  }
  return "?";
}

ScoreExpr sim(std::string time_var, std::string proto_var) {
  return {expr::Sim{std::move(time_var), std::move(proto_var)}};
}
ScoreExpr constant(double v) { return {expr::Const{v}}; }
ScoreExpr abs_of(ScoreExpr e) { return {expr::Abs{std::move(e)}}; }
ScoreExpr minus(ScoreExpr lhs, ScoreExpr rhs) { return {expr::Sub{std::move(lhs), std::move(rhs)}}; }

TimeTerm tvar(std::string name) { return {tterm::Var{std::move(name)}}; }
TimeTerm tconst(std::int64_t n) { return {tterm::Int{n}}; }
TimeTerm trace_end() { return {tterm::End{}}; }
TimeTerm tplus(std::string name, std::int64_t n) { return {tterm::VarPlus{std::move(name), n}}; }

Formula top() { return {node::True{}}; }
Formula predicate(ScoreExpr lhs, Comparison op, ScoreExpr rhs) {
  return {node::Predicate{std::move(lhs), op, std::move(rhs)}};
}
Formula time_cmp(TimeTerm lhs, Comparison op, TimeTerm rhs) {
  return {node::TimeConstraint{std::move(lhs), op, std::move(rhs)}};
}
Formula class_is(Label label) { return {node::ClassAtom{node::ClassOfVideo{label}}}; }
Formula in_class(std::string proto_var, Label label) {
  return {node::ClassAtom{node::ProtoInClass{std::move(proto_var), label}}};
}
Formula lnot(Formula f) { return {node::Not{std::move(f)}}; }
Formula lor(Formula lhs, Formula rhs) { return {node::Or{std::move(lhs), std::move(rhs)}}; }
Formula land(Formula lhs, Formula rhs) { return {node::And{std::move(lhs), std::move(rhs)}}; }
Formula implies(Formula lhs, Formula rhs) { return {node::Implies{std::move(lhs), std::move(rhs)}}; }
Formula until(Formula lhs, Formula rhs) { return {node::Until{std::move(lhs), std::move(rhs)}}; }
Formula eventually(Formula f) { return {node::Eventually{std::move(f)}}; }
Formula always(Formula f) { return {node::Always{std::move(f)}}; }
Formula freeze(std::string time_var, Formula body) {
  return {node::Freeze{std::move(time_var), std::move(body)}};
}
Formula exists(std::string proto_var, std::string at_time_var, Formula body) {
  return {node::ExistsProto{std::move(proto_var), std::move(at_time_var), std::move(body)}};
}
Formula forall(std::string proto_var, std::string at_time_var, Formula body) {
  return {node::ForallProto{std::move(proto_var), std::move(at_time_var), std::move(body)}};
}

// ---------------------------------------------------------------------------

bool is_core(const Formula& f) {
  return std::visit(
      overloaded{
          [](const node::True&) { return true; },
          [](const node::Predicate&) { return true; },
          [](const node::ClassAtom&) { return true; },
          [](const node::TimeConstraint&) { return true; },
          [](const node::Not& n) { return is_core(*n.arg); },
          [](const node::Or& n) { return is_core(*n.lhs) && is_core(*n.rhs); },
          [](const node::Until& n) { return is_core(*n.lhs) && is_core(*n.rhs); },
          [](const node::Freeze& n) { return is_core(*n.body); },
          [](const node::ExistsProto& n) { return is_core(*n.body); },
          [](const auto&) { return false; },
      },
      f.node);
}

Formula lower(const Formula& f) {
  return std::visit(
      overloaded{
          [&](const node::True&) { return f; },
          [&](const node::Predicate&) { return f; },
          [&](const node::ClassAtom&) { return f; },
          [&](const node::TimeConstraint&) { return f; },
          [](const node::Not& n) { return lnot(lower(*n.arg)); },
          [](const node::Or& n) { return lor(lower(*n.lhs), lower(*n.rhs)); },
          [](const node::Until& n) { return until(lower(*n.lhs), lower(*n.rhs)); },
          [](const node::Freeze& n) { return freeze(n.time_var, lower(*n.body)); },
          [](const node::ExistsProto& n) { return exists(n.proto_var, n.at_time_var, lower(*n.body)); },
          // a and b == not (not a or not b)
          [](const node::And& n) { return lnot(lor(lnot(lower(*n.lhs)), lnot(lower(*n.rhs)))); },
          // a -> b == not a or b
          [](const node::Implies& n) { return lor(lnot(lower(*n.lhs)), lower(*n.rhs)); },
          // eventually a == true until a
          [](const node::Eventually& n) { return until(top(), lower(*n.arg)); },
          // always a == not eventually not a
          [](const node::Always& n) { return lnot(until(top(), lnot(lower(*n.arg)))); },
          // forall p . a == not exists p . not a
          [](const node::ForallProto& n) {
            return lnot(exists(n.proto_var, n.at_time_var, lnot(lower(*n.body))));
          },
      },
      f.node);
}

// ---------------------------------------------------------------------------

std::string ScopeError::message() const {
  return std::string("unbound ") + (kind == VarKind::Time ? "time" : "prototype") + " variable '" +
         variable + "' at " + path;
}

namespace {

class ScopeChecker {
 public:
  std::vector<ScopeError> errors;

  void check(const Formula& f, const std::string& path) {
    std::visit(
        overloaded{
            [&](const node::True&) {},
            [&](const node::Predicate& n) {
              check_expr(n.lhs, path + "/lhs");
              check_expr(n.rhs, path + "/rhs");
            },
            [&](const node::ClassAtom& n) {
              if (const auto* in = std::get_if<node::ProtoInClass>(&n.atom)) {
                require(in->proto_var, VarKind::Prototype, path + "/inclass");
              }
            },
            [&](const node::TimeConstraint& n) {
              check_term(n.lhs, path + "/lhs");
              check_term(n.rhs, path + "/rhs");
            },
            [&](const node::Not& n) { check(*n.arg, path + "/not"); },
            [&](const node::Or& n) { binary(*n.lhs, *n.rhs, path + "/or"); },
            [&](const node::And& n) { binary(*n.lhs, *n.rhs, path + "/and"); },
            [&](const node::Implies& n) { binary(*n.lhs, *n.rhs, path + "/implies"); },
            [&](const node::Until& n) { binary(*n.lhs, *n.rhs, path + "/until"); },
            [&](const node::Eventually& n) { check(*n.arg, path + "/eventually"); },
            [&](const node::Always& n) { check(*n.arg, path + "/always"); },
            [&](const node::Freeze& n) {
              time_.push_back(n.time_var);
              check(*n.body, path + "/freeze(" + n.time_var + ")");
              time_.pop_back();
            },
            [&](const node::ExistsProto& n) {
              quantifier(n.proto_var, n.at_time_var, *n.body, path + "/exists(" + n.proto_var + ")");
            },
            [&](const node::ForallProto& n) {
              quantifier(n.proto_var, n.at_time_var, *n.body, path + "/forall(" + n.proto_var + ")");
            },
        },
        f.node);
  }

 private:
  std::vector<std::string> time_;
  std::vector<std::string> proto_;

  void binary(const Formula& lhs, const Formula& rhs, const std::string& path) {
    check(lhs, path + "/lhs");
    check(rhs, path + "/rhs");
  }

  void quantifier(const std::string& var, const std::string& at, const Formula& body,
                  const std::string& path) {
    require(at, VarKind::Time, path + "/at");
    proto_.push_back(var);
    check(body, path);
    proto_.pop_back();
  }

  void require(const std::string& name, VarKind kind, const std::string& path) {
    const auto& scope = kind == VarKind::Time ? time_ : proto_;
    for (const auto& bound : scope) {
      if (bound == name) return;
    }
    errors.push_back({name, kind, path});
  }

  void check_expr(const ScoreExpr& e, const std::string& path) {
    std::visit(overloaded{
                   [&](const expr::Sim& s) {
                     require(s.time_var, VarKind::Time, path + "/S");
                     require(s.proto_var, VarKind::Prototype, path + "/S");
                   },
                   [&](const expr::Const&) {},
                   [&](const expr::Abs& a) { check_expr(*a.arg, path + "/abs"); },
                   [&](const expr::Sub& s) {
                     check_expr(*s.lhs, path + "/sub.lhs");
                     check_expr(*s.rhs, path + "/sub.rhs");
                   },
               },
               e.node);
  }

  void check_term(const TimeTerm& t, const std::string& path) {
    std::visit(overloaded{
                   [&](const tterm::Var& v) { require(v.name, VarKind::Time, path); },
                   [&](const tterm::VarPlus& v) { require(v.name, VarKind::Time, path); },
                   [&](const auto&) {},
               },
               t.node);
  }
};

} // namespace

std::vector<ScopeError> scope_check(const Formula& f) {
  ScopeChecker checker;
  checker.check(f, "");
  return std::move(checker.errors);
}

// ---------------------------------------------------------------------------
// Pretty printing. Formula precedence, loosest first:
//   until (left) < -> (right) < or < and < unary < atom

namespace {

enum Prec : int { kUntil = 0, kImplies, kOr, kAnd, kUnary, kAtom };

std::string format_constant(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void print_expr(const ScoreExpr& e, bool needs_group, std::string& out) {
  std::visit(overloaded{
                 [&](const expr::Sim& s) { out += "S(" + s.time_var + ", " + s.proto_var + ")"; },
                 [&](const expr::Const& c) { out += format_constant(c.value); },
                 [&](const expr::Abs& a) {
                   out += "abs(";
                   print_expr(*a.arg, false, out);
                   out += ")";
                 },
                 [&](const expr::Sub& s) {
                   if (needs_group) out += "(";
                   print_expr(*s.lhs, false, out);
                   out += " - ";
                   print_expr(*s.rhs, true, out);
                   if (needs_group) out += ")";
                 },
             },
             e.node);
}

int precedence(const Formula& f) {
  return std::visit(overloaded{
                        [](const node::Until&) { return int{kUntil}; },
                        [](const node::Implies&) { return int{kImplies}; },
                        [](const node::Or&) { return int{kOr}; },
                        [](const node::And&) { return int{kAnd}; },
                        [](const node::Not&) { return int{kUnary}; },
                        [](const node::Eventually&) { return int{kUnary}; },
                        [](const node::Always&) { return int{kUnary}; },
                        [](const node::Freeze&) { return int{kUnary}; },
                        [](const node::ExistsProto&) { return int{kUnary}; },
                        [](const node::ForallProto&) { return int{kUnary}; },
                        [](const auto&) { return int{kAtom}; },
                    },
                    f.node);
}

void print_formula(const Formula& f, int min_prec, std::string& out);

void print_binary(const Formula& lhs, std::string_view op, const Formula& rhs, int lhs_prec,
                  int rhs_prec, std::string& out) {
  print_formula(lhs, lhs_prec, out);
  out += ' ';
  out += op;
  out += ' ';
  print_formula(rhs, rhs_prec, out);
}

void print_formula(const Formula& f, int min_prec, std::string& out) {
  const bool wrap = precedence(f) < min_prec;
  if (wrap) out += '(';
  std::visit(
      overloaded{
          [&](const node::True&) { out += "true"; },
          [&](const node::Predicate& n) {
            print_expr(n.lhs, false, out);
            out += ' ';
            out += to_string(n.op);
            out += ' ';
            print_expr(n.rhs, false, out);
          },
          [&](const node::ClassAtom& n) {
            std::visit(overloaded{
                           [&](const node::ClassOfVideo& c) {
                             out += "class() == ";
                             out += to_string(c.label);
                           },
                           [&](const node::ProtoInClass& c) {
                             out += "inclass(" + c.proto_var + ", ";
                             out += to_string(c.label);
                             out += ")";
                           },
                       },
                       n.atom);
          },
          [&](const node::TimeConstraint& n) {
            out += pretty_print(n.lhs);
            out += ' ';
            out += to_string(n.op);
            out += ' ';
            out += pretty_print(n.rhs);
          },
          [&](const node::Until& n) { print_binary(*n.lhs, "until", *n.rhs, kUntil, kImplies, out); },
          [&](const node::Implies& n) { print_binary(*n.lhs, "->", *n.rhs, kOr, kImplies, out); },
          [&](const node::Or& n) { print_binary(*n.lhs, "or", *n.rhs, kOr, kAnd, out); },
          [&](const node::And& n) { print_binary(*n.lhs, "and", *n.rhs, kAnd, kUnary, out); },
          [&](const node::Not& n) {
            out += "not ";
            print_formula(*n.arg, kUnary, out);
          },
          [&](const node::Eventually& n) {
            out += "eventually ";
            print_formula(*n.arg, kUnary, out);
          },
          [&](const node::Always& n) {
            out += "always ";
            print_formula(*n.arg, kUnary, out);
          },
          [&](const node::Freeze& n) {
            out += "freeze " + n.time_var + " . ";
            print_formula(*n.body, kUnary, out);
          },
          [&](const node::ExistsProto& n) {
            out += "exists " + n.proto_var + " at " + n.at_time_var + " . ";
            print_formula(*n.body, kUnary, out);
          },
          [&](const node::ForallProto& n) {
            out += "forall " + n.proto_var + " at " + n.at_time_var + " . ";
            print_formula(*n.body, kUnary, out);
          },
      },
      f.node);
  if (wrap) out += ')';
}

} // namespace

std::string pretty_print(const ScoreExpr& e) {
  std::string out;
  print_expr(e, false, out);
  return out;
}

std::string pretty_print(const TimeTerm& t) {
  return std::visit(overloaded{
                        [](const tterm::Var& v) { return v.name; },
                        [](const tterm::Int& i) { return std::to_string(i.value); },
                        [](const tterm::End&) { return std::string("T"); },
                        [](const tterm::VarPlus& v) { return v.name + " + " + std::to_string(v.offset); },
                    },
                    t.node);
}

std::string pretty_print(const Formula& f) {
  std::string out;
  print_formula(f, kUntil, out);
  return out;
}

} // namespace proto_tqtl::tqtl
