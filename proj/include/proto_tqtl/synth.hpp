#pragma once

#include "proto_tqtl/label.hpp"
#include "proto_tqtl/proto/core.hpp"
#include "proto_tqtl/trace.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace proto_tqtl::synth {

/// Synthetic stand-in for encoder output: every patch of a clip is its
/// class center plus isotropic Gaussian noise. Not a model of real video
/// latents.
struct SynthSpec {
  std::size_t clips_per_class = 20;
  std::size_t height = 4;
  std::size_t width = 4;
  std::size_t dim = 8;
  /// Indexed by class (REAL, FAKE). Clip i of a class uses center i mod count.
  std::array<std::vector<proto::Vector>, kNumClasses> class_centers;
  double noise_scale = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// REAL clips first, then FAKE. Clip n (global index) draws its noise from
/// a generator seeded with seed + n, so clips can be produced independently.
std::vector<proto::LatentClip> generate_dataset(const SynthSpec& spec);

/// Config file: a JSON object with the SynthSpec fields; class_centers is
/// {"REAL": [[..C..], ...], "FAKE": [[..C..], ...]}.
SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec read_synth_spec(const std::filesystem::path& path);
std::string format_synth_spec(const SynthSpec& spec);

struct ScriptMetadata {
  std::string video_id = "scripted";
  Label ground_truth = Label::Fake;
  Label predicted = Label::Fake;
  /// Class of each prototype column of the schedule.
  std::vector<Label> prototype_classes;
};

/// Builds a trace whose frame t, prototype j score is schedule[t][j].
/// Throws InvariantError on an empty schedule or an out-of-range score.
Trace script_trace(const std::vector<std::vector<double>>& schedule, const ScriptMetadata& meta);

} // namespace proto_tqtl::synth
