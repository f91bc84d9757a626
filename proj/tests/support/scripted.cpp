#include "scripted.hpp"

#include "proto_tqtl/synth.hpp"

namespace proto_tqtl::testing {

namespace {

using tqtl::Verdict;

// Column values for one video: `own` feeds the two prototypes of the
// video's class, `other` the two of the opposite class. Each inner vector
// is one frame's pair of scores.
struct Columns {
  std::vector<std::array<double, 2>> own;
  std::vector<std::array<double, 2>> other;
};

Trace build(const std::string& id, Label cls, const Columns& cols) {
  synth::ScriptMetadata meta;
  meta.video_id = id;
  meta.ground_truth = cls;
  meta.predicted = cls;
  meta.prototype_classes = {Label::Real, Label::Real, Label::Fake, Label::Fake};
  std::vector<std::vector<double>> schedule;
  for (std::size_t t = 0; t < cols.own.size(); ++t) {
    const auto& real = cls == Label::Real ? cols.own[t] : cols.other[t];
    const auto& fake = cls == Label::Real ? cols.other[t] : cols.own[t];
    schedule.push_back({real[0], real[1], fake[0], fake[1]});
  }
  return synth::script_trace(schedule, meta);
}

std::vector<std::array<double, 2>> flat(std::size_t frames, double a, double b) {
  return std::vector<std::array<double, 2>>(frames, {a, b});
}

} // namespace

std::vector<ScriptedCase> scripted_cases() {
  std::vector<ScriptedCase> out;
  for (Label cls : {Label::Fake, Label::Real}) {
    const std::string tag = cls == Label::Fake ? "fake" : "real";

    // Key frame: own prototype peaks at 0.95 on frame 3 while the opposite
    // class never exceeds 0.9.
    Columns key{flat(6, 0.5, 0.4), flat(6, 0.3, 0.9)};
    key.own[3][0] = 0.95;
    out.push_back({tag + "_keyframe_sat", "phi1", build(tag + "_keyframe_sat", cls, key), Verdict::Sat});

    // An opposite-class prototype beats every own-class score on the last
    // frame, which lies in the window of every key-frame candidate.
    Columns beaten = key;
    beaten.other[5][1] = 0.99;
    out.push_back({tag + "_keyframe_unsat", "phi1", build(tag + "_keyframe_unsat", cls, beaten), Verdict::Unsat});

    // Opposite class flat at 0.2.
    Columns quiet{flat(8, 0.8, 0.7), flat(8, 0.2, 0.2)};
    out.push_back({tag + "_quiet_sat", "phi2", build(tag + "_quiet_sat", cls, quiet), Verdict::Sat});

    // FAKE videos get a 0.45 spike; REAL videos a 0.2 -> 0.35 jump two
    // frames apart, inside the ceiling but over the drift bound.
    Columns noisy = quiet;
    if (cls == Label::Fake) {
      noisy.other[4][0] = 0.45;
    } else {
      noisy.other[3][1] = 0.35;
    }
    out.push_back({tag + "_noisy_unsat", "phi2", build(tag + "_noisy_unsat", cls, noisy), Verdict::Unsat});

    // Opposite class swings between 0.09 and 0.39 every frame.
    Columns swinging{flat(8, 0.8, 0.7), {}};
    for (std::size_t t = 0; t < 8; ++t) swinging.other.push_back({t % 2 ? 0.39 : 0.09, 0.2});
    out.push_back({tag + "_swinging_sat", "phi3", build(tag + "_swinging_sat", cls, swinging), Verdict::Sat});

    Columns over = quiet;
    over.other[5][1] = 0.41;
    out.push_back({tag + "_over_ceiling_unsat", "phi3", build(tag + "_over_ceiling_unsat", cls, over), Verdict::Unsat});
  }
  return out;
}

} // namespace proto_tqtl::testing
