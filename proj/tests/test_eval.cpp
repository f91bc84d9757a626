#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "proto_tqtl/error.hpp"
#include "proto_tqtl/tqtl/eval.hpp"
#include "proto_tqtl/tqtl/parser.hpp"

#include <cmath>

using namespace proto_tqtl;
using namespace proto_tqtl::tqtl;

namespace {

Trace constant_trace(std::size_t length, std::vector<double> scores) {
  Trace t;
  t.video_id = "c";
  t.ground_truth = Label::Fake;
  t.predicted = Label::Real;
  for (std::size_t j = 0; j < scores.size(); ++j) t.catalog.push_back({j, j % 2 ? Label::Fake : Label::Real});
  for (std::size_t i = 0; i < length; ++i) t.frames.push_back({i, scores});
  return t;
}

// Per-frame robustness table as a formula: frame j yields values[j].
std::string table(const std::vector<double>& values) {
  std::string out = "freeze x . (";
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j) out += " or ";
    out += "(x == " + std::to_string(j) + " and " + std::to_string(values[j]) + " > 0)";
  }
  return out + ")";
}

Robustness eval_text(const std::string& text, const Trace& trace, EvalOptions opts = {}) {
  return robustness(parse(text), trace, opts);
}

} // namespace

TEST_CASE("extended reals", "[eval][robustness]") {
  const auto inf = Robustness::pos_inf();
  const auto ninf = Robustness::neg_inf();
  const auto two = Robustness::finite(2.0);
  REQUIRE(-inf == ninf);
  REQUIRE(-ninf == inf);
  REQUIRE(-two == Robustness::finite(-2.0));
  REQUIRE(ninf < two);
  REQUIRE(two < inf);
  REQUIRE(max(ninf, two) == two);
  REQUIRE(min(inf, two) == two);
  REQUIRE(max(max(ninf, two), inf) == max(ninf, max(two, inf)));
  REQUIRE(inf.to_string() == "+inf");
  REQUIRE(ninf.to_string() == "-inf");
  REQUIRE_THROWS_AS(Robustness::finite(std::nan("")), EvalError);
}

TEST_CASE("clauses of the quantitative semantics", "[eval]") {
  const Trace trace = constant_trace(4, {0.3, 0.8});

  REQUIRE(evaluate(top(), trace, 0, Environment{}) == Robustness::pos_inf());

  SECTION("time constraints are crisp") {
    const Environment env = Environment{}.bind_time("x", 2).bind_time("y", 1);
    REQUIRE(evaluate(time_cmp(tvar("x"), Comparison::Le, tplus("y", 1)), trace, 0, env) == Robustness::pos_inf());
    REQUIRE(evaluate(time_cmp(tvar("x"), Comparison::Le, tvar("y")), trace, 0, env) == Robustness::neg_inf());
    REQUIRE(evaluate(time_cmp(tvar("x"), Comparison::Lt, trace_end()), trace, 0, env) == Robustness::pos_inf());
  }

  SECTION("predicate margins") {
    const Environment env = Environment{}.bind_time("t", 0).bind_proto("p", 1);
    auto margin = [&](Comparison op, double c) {
      return evaluate(predicate(sim("t", "p"), op, constant(c)), trace, 0, env).value();
    };
    REQUIRE(margin(Comparison::Gt, 0.5) == 0.8 - 0.5);
    REQUIRE(margin(Comparison::Ge, 0.5) == 0.8 - 0.5);
    REQUIRE(margin(Comparison::Lt, 0.5) == 0.5 - 0.8);
    REQUIRE(margin(Comparison::Le, 0.9) == 0.9 - 0.8);
    REQUIRE(margin(Comparison::Eq, 0.5) == -std::fabs(0.8 - 0.5));
    REQUIRE(margin(Comparison::Ne, 0.5) == std::fabs(0.8 - 0.5));
  }

  SECTION("class atoms") {
    REQUIRE(eval_text("class() == REAL", trace) == Robustness::pos_inf());
    EvalOptions truth;
    truth.class_source = ClassSource::GroundTruth;
    REQUIRE(eval_text("class() == REAL", trace, truth) == Robustness::neg_inf());
    REQUIRE(eval_text("freeze t . exists p at t . inclass(p, FAKE)", trace) == Robustness::pos_inf());
    REQUIRE(eval_text("freeze t . forall p at t . inclass(p, FAKE)", trace) == Robustness::neg_inf());
  }

  SECTION("negation, disjunction, quantifier") {
    REQUIRE(eval_text("not (freeze t . exists p at t . S(t, p) > 0.5)", trace).value() == -(0.8 - 0.5));
    REQUIRE(eval_text("freeze t . exists p at t . S(t, p) > 0.5", trace).value() == 0.8 - 0.5);
    REQUIRE(eval_text("freeze t . forall p at t . S(t, p) > 0.5", trace).value() == 0.3 - 0.5);
    REQUIRE(eval_text("0.25 > 0 or 0.75 > 0", trace).value() == 0.75);
  }

  SECTION("freeze binds the current frame") {
    Trace ramp = constant_trace(3, {0.1});
    ramp.frames[1].similarities[0] = 0.2;
    ramp.frames[2].similarities[0] = 0.9;
    const Environment env = Environment{}.bind_proto("p", 0);
    const Formula f = freeze("t", predicate(sim("t", "p"), Comparison::Gt, constant(0.0)));
    REQUIRE(evaluate(f, ramp, 2, env).value() == 0.9);
    REQUIRE(evaluate(f, ramp, 1, env).value() == 0.2);
  }
}

TEST_CASE("until over a hand-enumerated table", "[eval][until]") {
  const Trace trace = constant_trace(3, {0.5});
  const std::string a = table({5, 3, -1});
  const std::string b = table({-2, -4, 7});
  const Robustness r = eval_text("(" + a + ") until (" + b + ")", trace);
  REQUIRE(r == Robustness::finite(3.0));

  // Shorter horizons from later start frames.
  const Formula u = lower(parse("(" + a + ") until (" + b + ")"));
  REQUIRE(evaluate(u, trace, 1, Environment{}) == Robustness::finite(3.0));
  REQUIRE(evaluate(u, trace, 2, Environment{}) == Robustness::finite(7.0));
}

TEST_CASE("verdicts", "[eval][verdict]") {
  REQUIRE(verdict_of(Robustness::pos_inf()) == Verdict::Sat);
  REQUIRE(verdict_of(Robustness::finite(0.0)) == Verdict::Inconclusive);
  REQUIRE(verdict_of(Robustness::finite(-0.0)) == Verdict::Inconclusive);
  REQUIRE(verdict_of(Robustness::finite(-0.05)) == Verdict::Unsat);
  REQUIRE(to_string(Verdict::Inconclusive) == "INCONCLUSIVE");

  // A tie: S(t, p) > c with S exactly c.
  const Trace trace = constant_trace(2, {0.5});
  const Formula tie = parse("freeze t . exists p at t . S(t, p) > 0.5");
  REQUIRE(satisfies(tie, trace) == Verdict::Inconclusive);
  REQUIRE_FALSE(boolean_oracle(lower(tie), trace, 0, Environment{}));
}

TEST_CASE("evaluation errors", "[eval]") {
  const Trace trace = constant_trace(2, {0.5});
  REQUIRE_THROWS_AS(evaluate(always(top()), trace, 0, Environment{}), EvalError);
  REQUIRE_THROWS_AS(evaluate(top(), trace, 2, Environment{}), EvalError);
  try {
    evaluate(predicate(sim("t", "p"), Comparison::Gt, constant(0.0)), trace, 0, Environment{});
    FAIL("evaluated an open formula");
  } catch (const EvalError& e) {
    REQUIRE(std::string(e.what()).find("'t'") != std::string::npos);
  }
}

TEST_CASE("sign agrees with the boolean oracle", "[eval][property]") {
  testing::Rng rng(5);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const Formula f = lower(testing::random_formula(rng));
    const Trace t = testing::random_trace(rng, 1 + rng() % 6, 1 + rng() % 3);
    const Robustness r = evaluate(f, t, 0, Environment{});
    if (r == Robustness::finite(0.0)) continue;
    ++compared;
    INFO(pretty_print(f));
    REQUIRE((r > Robustness::finite(0.0)) == boolean_oracle(f, t, 0, Environment{}));
  }
  REQUIRE(compared > 1500);
}

TEST_CASE("algebraic identities hold bit for bit", "[eval][property]") {
  testing::Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    const Formula a = testing::random_formula(rng, {4, true});
    const Formula b = testing::random_formula(rng, {4, true});
    const Trace t = testing::random_trace(rng, 1 + rng() % 6, 1 + rng() % 3);
    auto r = [&](const Formula& f) { return robustness(f, t); };

    REQUIRE(r(lnot(lnot(a))).identical(r(a)));
    REQUIRE(r(lnot(lor(a, b))).identical(min(r(lnot(a)), r(lnot(b)))));
    REQUIRE(r(eventually(a)).identical(r(until(top(), a))));
    REQUIRE(r(always(a)).identical(-r(eventually(lnot(a)))));
    REQUIRE(r(a).identical(r(a)));
  }
}

TEST_CASE("raising every score raises a lower-bound margin by the same amount", "[eval][property]") {
  testing::Rng rng(13);
  const Formula f = parse("freeze t . exists p at t . S(t, p) > 0.25");
  for (int i = 0; i < 100; ++i) {
    Trace t = testing::random_trace(rng, 1 + rng() % 5, 1 + rng() % 3);
    for (auto& fr : t.frames) {
      for (auto& s : fr.similarities) s = 0.3 + 0.5 * s;
    }
    Trace shifted = t;
    const double delta = 0.125;
    for (auto& fr : shifted.frames) {
      for (auto& s : fr.similarities) s += delta;
    }
    REQUIRE(robustness(f, shifted).value() - robustness(f, t).value() == Catch::Approx(delta).margin(1e-15));
  }
}
