#include <catch_amalgamated.hpp>

#include "proto_tqtl/error.hpp"
#include "proto_tqtl/spec_library.hpp"
#include "proto_tqtl/synth.hpp"

using namespace proto_tqtl;
using namespace proto_tqtl::synth;

namespace {

SynthSpec small_spec() {
  SynthSpec s;
  s.clips_per_class = 3;
  s.height = 2;
  s.width = 2;
  s.dim = 2;
  s.class_centers[index_of(Label::Real)] = {{0.0, 0.0}, {1.0, 1.0}};
  s.class_centers[index_of(Label::Fake)] = {{5.0, 5.0}};
  s.seed = 42;
  return s;
}

} // namespace

TEST_CASE("dataset generation", "[synth]") {
  SynthSpec s = small_spec();

  SECTION("zero noise reproduces the centers") {
    s.noise_scale = 0.0;
    const auto clips = generate_dataset(s);
    REQUIRE(clips.size() == 6);
    REQUIRE(clips[0].label() == Label::Real);
    REQUIRE(clips[5].label() == Label::Fake);
    for (std::size_t p = 0; p < 4; ++p) {
      REQUIRE(std::vector<double>(clips[1].patch(p).begin(), clips[1].patch(p).end()) == std::vector<double>{1.0, 1.0});
      REQUIRE(std::vector<double>(clips[2].patch(p).begin(), clips[2].patch(p).end()) == std::vector<double>{0.0, 0.0});
      REQUIRE(std::vector<double>(clips[4].patch(p).begin(), clips[4].patch(p).end()) == std::vector<double>{5.0, 5.0});
    }
  }

  SECTION("seed determinism") {
    REQUIRE(generate_dataset(s) == generate_dataset(s));
    SynthSpec other = s;
    other.seed = 43;
    REQUIRE_FALSE(generate_dataset(other) == generate_dataset(s));
  }

  SECTION("noise is centred on the class center") {
    s.clips_per_class = 200;
    s.class_centers[index_of(Label::Real)] = {{0.0, 0.0}};
    const auto clips = generate_dataset(s);
    double mean = 0.0;
    std::size_t n = 0;
    for (const auto& c : clips) {
      if (c.label() != Label::Real) continue;
      for (double v : c.data()) {
        mean += v;
        ++n;
      }
    }
    REQUIRE(std::abs(mean / static_cast<double>(n)) < 0.01);
  }

  SECTION("invalid specs") {
    s.noise_scale = -1.0;
    REQUIRE_THROWS_AS(generate_dataset(s), InvariantError);
    s = small_spec();
    s.class_centers[index_of(Label::Fake)].clear();
    REQUIRE_THROWS_AS(generate_dataset(s), InvariantError);
    s = small_spec();
    s.class_centers[index_of(Label::Fake)] = {{1.0, 2.0, 3.0}};
    REQUIRE_THROWS_AS(generate_dataset(s), InvariantError);
  }
}

TEST_CASE("config files", "[synth]") {
  const SynthSpec s = small_spec();
  const SynthSpec back = parse_synth_spec(format_synth_spec(s));
  REQUIRE(generate_dataset(back) == generate_dataset(s));

  const SynthSpec defaults = parse_synth_spec(R"({"class_centers": {"REAL": [[0]], "FAKE": [[1]]}, "dim": 1})");
  REQUIRE(defaults.clips_per_class == 20);
  REQUIRE(defaults.noise_scale == 0.1);

  REQUIRE_THROWS_AS(parse_synth_spec("{"), Error);
  REQUIRE_THROWS_AS(parse_synth_spec(R"({"dim": 2})"), Error);
  REQUIRE_THROWS_AS(read_synth_spec("/nonexistent.json"), Error);

  const SynthSpec shipped = read_synth_spec(std::string(PROJECT_ROOT) + "/data/two_gaussians.json");
  REQUIRE(shipped.dim == 8);
}

TEST_CASE("scripted traces", "[synth]") {
  ScriptMetadata meta;
  meta.prototype_classes = {Label::Real, Label::Fake};
  meta.predicted = Label::Fake;

  const std::vector<std::vector<double>> quiet(6, {0.2, 0.7});
  const Trace t = script_trace(quiet, meta);
  REQUIRE(t.length() == 6);
  REQUIRE(t.similarity(3, 1) == 0.7);
  REQUIRE(tqtl::satisfies(*specs::builtin("phi2", {}), t) == tqtl::Verdict::Sat);

  auto spiked = quiet;
  spiked[2][0] = 0.45;
  const tqtl::Formula phi2 = tqtl::lower(*specs::builtin("phi2", {}));
  REQUIRE_FALSE(tqtl::boolean_oracle(phi2, script_trace(spiked, meta), 0, tqtl::Environment{}));

  REQUIRE_THROWS_AS(script_trace({}, meta), InvariantError);
  REQUIRE_THROWS_AS(script_trace({{0.2, 1.5}}, meta), InvariantError);
  REQUIRE_THROWS_AS(script_trace({{0.2}}, meta), InvariantError);
}
