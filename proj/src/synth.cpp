#include "proto_tqtl/synth.hpp"

#include "json_io.hpp"
#include "proto_tqtl/error.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace proto_tqtl::synth {

using nlohmann::json;

void SynthSpec::validate() const {
  if (height == 0 || width == 0 || dim == 0) throw InvariantError("grid and dimension must be >= 1", "");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw InvariantError("noise_scale must be >= 0", std::to_string(noise_scale));
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto name = std::string(to_string(label_at(k)));
    if (class_centers[k].empty()) throw InvariantError("every class needs at least one center", name);
    for (const auto& c : class_centers[k]) {
      if (c.size() != dim) throw InvariantError("center dimension must equal dim", name);
    }
  }
}

std::vector<proto::LatentClip> generate_dataset(const SynthSpec& spec) {
  spec.validate();
  std::vector<proto::LatentClip> clips;
  clips.reserve(kNumClasses * spec.clips_per_class);
  std::size_t global = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto& centers = spec.class_centers[k];
    for (std::size_t i = 0; i < spec.clips_per_class; ++i, ++global) {
      std::mt19937_64 rng(spec.seed + global);
      std::normal_distribution<double> noise(0.0, 1.0);
      const auto& center = centers[i % centers.size()];
      std::vector<double> data;
      data.reserve(spec.height * spec.width * spec.dim);
      for (std::size_t z = 0; z < spec.height * spec.width; ++z) {
        for (std::size_t c = 0; c < spec.dim; ++c) {
          data.push_back(spec.noise_scale == 0.0 ? center[c] : center[c] + spec.noise_scale * noise(rng));
        }
      }
      clips.emplace_back(spec.height, spec.width, spec.dim, std::move(data), label_at(k));
    }
  }
  return clips;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("synth config: field '") + key + "' has the wrong type");
  }
}

} // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(std::string("synth config: ") + e.what());
  }
  if (!j.is_object()) throw Error("synth config must be a JSON object");

  SynthSpec spec;
  spec.clips_per_class = get_or<std::size_t>(j, "clips_per_class", spec.clips_per_class);
  spec.height = get_or<std::size_t>(j, "height", spec.height);
  spec.width = get_or<std::size_t>(j, "width", spec.width);
  spec.dim = get_or<std::size_t>(j, "dim", spec.dim);
  spec.noise_scale = get_or<double>(j, "noise_scale", spec.noise_scale);
  spec.seed = get_or<std::uint64_t>(j, "seed", spec.seed);

  auto centers = j.find("class_centers");
  if (centers == j.end() || !centers->is_object()) throw Error("synth config: 'class_centers' object is required");
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const std::string name(to_string(label_at(k)));
    spec.class_centers[k] = get_or<std::vector<proto::Vector>>(*centers, name.c_str(), {});
  }
  spec.validate();
  return spec;
}

SynthSpec read_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_synth_spec(buf.str());
}

std::string format_synth_spec(const SynthSpec& spec) {
  json centers = json::object();
  for (std::size_t k = 0; k < kNumClasses; ++k) centers[std::string(to_string(label_at(k)))] = spec.class_centers[k];
  return detail::dump_canonical({{"clips_per_class", spec.clips_per_class},
                                 {"height", spec.height},
                                 {"width", spec.width},
                                 {"dim", spec.dim},
                                 {"noise_scale", spec.noise_scale},
                                 {"seed", spec.seed},
                                 {"class_centers", std::move(centers)}});
}

Trace script_trace(const std::vector<std::vector<double>>& schedule, const ScriptMetadata& meta) {
  Trace trace;
  trace.video_id = meta.video_id;
  trace.ground_truth = meta.ground_truth;
  trace.predicted = meta.predicted;
  for (std::size_t j = 0; j < meta.prototype_classes.size(); ++j) trace.catalog.push_back({j, meta.prototype_classes[j]});
  for (std::size_t t = 0; t < schedule.size(); ++t) trace.frames.push_back({t, schedule[t]});
  validate(trace);
  return trace;
}

} // namespace proto_tqtl::synth
