#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "proto_tqtl/error.hpp"
#include "proto_tqtl/trace.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <sstream>

using namespace proto_tqtl;

namespace {

Trace two_proto_trace() {
  Trace t;
  t.video_id = "v";
  t.ground_truth = Label::Fake;
  t.predicted = Label::Real;
  t.catalog = {{0, Label::Real}, {1, Label::Fake}};
  t.frames = {{0, {0.25, 1.0}}};
  return t;
}

std::string invariant_of(const Trace& t) {
  try {
    validate(t);
  } catch (const InvariantError& e) {
    return e.invariant();
  }
  return "";
}

Trace parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

} // namespace

TEST_CASE("minimal trace file", "[trace]") {
  const std::string text =
      R"({"T_V":1,"catalog":[{"class":"REAL","id":0},{"class":"FAKE","id":1}],"ground_truth":"FAKE","predicted":"FAKE","version":"1","video_id":"a"})"
      "\n"
      R"({"frame_index":0,"similarities":[0.5,0.75]})"
      "\n";
  const Trace t = parse_text(text);
  REQUIRE(t.length() == 1);
  REQUIRE(t.num_prototypes() == 2);
  REQUIRE(t.similarity(0, 1) == 0.75);
  REQUIRE(t.catalog[0].class_label == Label::Real);
  REQUIRE(format_trace(t) == text);
}

TEST_CASE("arity mismatch is rejected by name", "[trace]") {
  const std::string text =
      R"({"T_V":1,"catalog":[{"class":"REAL","id":0},{"class":"FAKE","id":1}],"ground_truth":"FAKE","predicted":"FAKE","version":"1","video_id":"a"})"
      "\n"
      R"({"frame_index":0,"similarities":[0.5,0.75,0.1]})"
      "\n";
  try {
    parse_text(text);
    FAIL("accepted a bad frame");
  } catch (const InvariantError& e) {
    REQUIRE(e.invariant() == "similarity arity mismatch");
  }
}

TEST_CASE("each invariant is named when violated", "[trace]") {
  Trace t = two_proto_trace();
  REQUIRE(invariant_of(t).empty());

  SECTION("empty") {
    t.frames.clear();
    REQUIRE(invariant_of(t) == invariant::kEmptyTrace);
    REQUIRE_THROWS_AS(format_trace(t), InvariantError);
  }
  SECTION("out of range") {
    t.frames[0].similarities[0] = 1.5;
    REQUIRE(invariant_of(t) == "similarity out of range");
  }
  SECTION("zero is outside (0, 1]") {
    t.frames[0].similarities[0] = 0.0;
    REQUIRE(invariant_of(t) == invariant::kRange);
  }
  SECTION("NaN") {
    t.frames[0].similarities[1] = std::nan("");
    REQUIRE(invariant_of(t) == invariant::kRange);
  }
  SECTION("frame order") {
    t.frames.push_back({2, {0.5, 0.5}});
    REQUIRE(invariant_of(t) == invariant::kFrameOrder);
  }
  SECTION("catalog ids") {
    t.catalog[1].id = 3;
    REQUIRE(invariant_of(t) == invariant::kCatalogIds);
  }
}

TEST_CASE("declared length must match frame count", "[trace]") {
  const std::string text =
      R"({"T_V":2,"catalog":[{"class":"REAL","id":0}],"ground_truth":"REAL","predicted":"REAL","version":"1","video_id":"a"})"
      "\n"
      R"({"frame_index":0,"similarities":[0.5]})"
      "\n";
  try {
    parse_text(text);
    FAIL("accepted a short file");
  } catch (const InvariantError& e) {
    REQUIRE(e.invariant() == invariant::kLengthMismatch);
  }
}

TEST_CASE("format errors carry the line number", "[trace]") {
  const std::string text =
      R"({"T_V":2,"catalog":[{"class":"REAL","id":0}],"ground_truth":"REAL","predicted":"REAL","version":"1","video_id":"a"})"
      "\n"
      R"({"frame_index":0,"similarities":[0.5]})"
      "\n"
      R"({"frame_index":1,"similarities":[0.5)"
      "\n";
  try {
    parse_text(text);
    FAIL("accepted malformed JSON");
  } catch (const FormatError& e) {
    REQUIRE(e.line() == 3);
  }
  REQUIRE_THROWS_AS(parse_text(""), FormatError);
  REQUIRE_THROWS_AS(parse_text(R"({"version":"2"})"), FormatError);
  REQUIRE_THROWS_AS(parse_text(
                        R"({"T_V":1,"catalog":[],"ground_truth":"MAYBE","predicted":"REAL","version":"1","video_id":"a"})"),
                    FormatError);
}

TEST_CASE("round trip is bit exact on random traces", "[trace][property]") {
  testing::Rng rng(11);
  const auto dir = std::filesystem::temp_directory_path() / "proto_tqtl_trace_test";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < 100; ++i) {
    const Trace t = testing::random_trace(rng, 1 + rng() % 12, 1 + rng() % 6);
    const auto path = dir / "t.trace";
    write_trace(t, path);
    const Trace back = read_trace(path);
    REQUIRE(back == t);
    for (std::size_t f = 0; f < t.length(); ++f) {
      for (std::size_t j = 0; j < t.num_prototypes(); ++j) {
        REQUIRE(std::bit_cast<std::uint64_t>(back.similarity(f, j)) == std::bit_cast<std::uint64_t>(t.similarity(f, j)));
      }
    }
    REQUIRE(format_trace(back) == format_trace(t));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing file reports its path", "[trace]") {
  try {
    read_trace("/nonexistent/x.trace");
    FAIL("opened a missing file");
  } catch (const Error& e) {
    REQUIRE(std::string(e.what()).find("/nonexistent/x.trace") != std::string::npos);
  }
}
