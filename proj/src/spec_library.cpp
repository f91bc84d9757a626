#include "proto_tqtl/spec_library.hpp"

#include "proto_tqtl/error.hpp"
#include "proto_tqtl/parallel.hpp"

#include <cmath>
#include <cstdio>

namespace proto_tqtl::specs {

using namespace proto_tqtl::tqtl;

void SpecParams::validate() const {
  if (!(similarity_ceiling > 0.0 && similarity_ceiling <= 1.0)) {
    throw InvariantError("similarity ceiling must lie in (0, 1]", std::to_string(similarity_ceiling));
  }
  if (!(drift_bound > 0.0) || !std::isfinite(drift_bound)) {
    throw InvariantError("drift bound must be positive", std::to_string(drift_bound));
  }
  if (window < 0) throw InvariantError("window must be >= 0", std::to_string(window));
}

// Variable names follow the usual presentation of these specifications.
namespace {
const std::string kT = "t";
const std::string kT2 = "t'";
} // namespace

Formula build_phi1(const SpecParams& params) {
  params.validate();
  const Label own = params.target_class;
  const Label other = opposite(own);

  // 0 < t' and t' < T: skips frame 0; T is the trace length, so the last frame still counts.
  Formula interior = land(time_cmp(tconst(0), Comparison::Lt, tvar(kT2)),
                          time_cmp(tvar(kT2), Comparison::Lt, trace_end()));
  Formula dominates = predicate(sim(kT, "p_k"), Comparison::Gt, sim(kT2, "p_j"));

  if (params.literal_phi1) {
    Formula every = forall("p_j", kT2, land(in_class("p_j", other), std::move(dominates)));
    Formula later = always(freeze(kT2, implies(std::move(interior), std::move(every))));
    return eventually(freeze(
        kT, exists("p_k", kT, implies(land(class_is(own), in_class("p_k", own)), std::move(later)))));
  }

  Formula every = forall("p_j", kT2, implies(in_class("p_j", other), std::move(dominates)));
  Formula later = always(freeze(kT2, implies(std::move(interior), std::move(every))));
  return eventually(
      freeze(kT, exists("p_k", kT, implies(class_is(own), land(in_class("p_k", own), std::move(later))))));
}

namespace {

Formula non_relevance(const SpecParams& params, bool with_drift) {
  params.validate();
  const Label own = params.target_class;
  Formula guard = land(class_is(own), in_class("p_i", opposite(own)));
  Formula low = predicate(sim(kT, "p_i"), Comparison::Lt, constant(params.similarity_ceiling));
  if (with_drift) {
    Formula in_window = land(time_cmp(tvar(kT), Comparison::Le, tvar(kT2)),
                             time_cmp(tvar(kT2), Comparison::Le, tplus(kT, params.window)));
    Formula steady = predicate(abs_of(minus(sim(kT2, "p_i"), sim(kT, "p_i"))), Comparison::Lt,
                               constant(params.drift_bound));
    low = land(std::move(low), always(freeze(kT2, implies(std::move(in_window), std::move(steady)))));
  }
  return always(freeze(kT, forall("p_i", kT, implies(std::move(guard), std::move(low)))));
}

} // namespace

Formula build_phi2(const SpecParams& params) { return non_relevance(params, true); }

Formula build_phi3(const SpecParams& params) { return non_relevance(params, false); }

Formula for_both_classes(Formula (*builder)(const SpecParams&), SpecParams params) {
  params.target_class = Label::Fake;
  Formula fake = builder(params);
  params.target_class = Label::Real;
  return land(std::move(fake), builder(params));
}

std::optional<Formula> builtin(const std::string& name, const SpecParams& params) {
  if (name == "phi1") return for_both_classes(build_phi1, params);
  if (name == "phi2") return for_both_classes(build_phi2, params);
  if (name == "phi3") return for_both_classes(build_phi3, params);
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::optional<double> GroupStats::percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(sat) / static_cast<double>(total);
}

namespace {

void tally(GroupStats& g, Verdict v) {
  ++g.total;
  switch (v) {
    case Verdict::Sat: ++g.sat; break;
    case Verdict::Unsat: ++g.unsat; break;
    case Verdict::Inconclusive: ++g.inconclusive; break;
  }
}

} // namespace

SatisfactionReport report(const Formula& spec, std::span<const Trace> traces, const ReportOptions& options) {
  if (traces.empty()) throw Error("report needs at least one trace");
  const std::size_t m = traces.front().num_prototypes();
  for (const auto& t : traces) {
    if (t.num_prototypes() != m) {
      throw Error("trace '" + t.video_id + "' has " + std::to_string(t.num_prototypes()) +
                  " prototypes, expected " + std::to_string(m));
    }
  }

  const Formula core = lower(spec);
  SatisfactionReport out;
  out.results.resize(traces.size());
  parallel_for(traces.size(), options.jobs, [&](std::size_t i) {
    const Trace& t = traces[i];
    const Robustness r = evaluate(core, t, 0, Environment{}, options.eval);
    out.results[i] = {t.video_id, t.ground_truth, t.predicted, r, verdict_of(r)};
  });

  for (const auto& r : out.results) {
    tally(r.ground_truth == Label::Fake ? out.positive : out.negative, r.verdict);
    tally(out.all, r.verdict);
  }
  return out;
}

std::string format_table(const SatisfactionReport& report, const std::string& column) {
  auto cell = [](const GroupStats& g) {
    char buf[32];
    if (auto p = g.percent()) {
      std::snprintf(buf, sizeof buf, "%10.2f", *p);
    } else {
      std::snprintf(buf, sizeof buf, "%10s", "n/a");
    }
    return std::string(buf);
  };
  char head[64];
  std::snprintf(head, sizeof head, "%-5s%10s\n", "", column.substr(0, 10).c_str());
  std::string out = head;
  out += "(+)  " + cell(report.positive) + "\n";
  out += "(-)  " + cell(report.negative) + "\n";
  out += "all  " + cell(report.all) + "\n";
  return out;
}

} // namespace proto_tqtl::specs
