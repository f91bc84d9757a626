#include "proto_tqtl/trace.hpp"

#include "json_io.hpp"
#include "proto_tqtl/error.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace proto_tqtl {

using nlohmann::json;

void validate(const Trace& trace) {
  if (trace.frames.empty()) throw InvariantError(invariant::kEmptyTrace, "T_V = 0");
  for (std::size_t i = 0; i < trace.catalog.size(); ++i) {
    if (trace.catalog[i].id != i) {
      throw InvariantError(invariant::kCatalogIds, "entry " + std::to_string(i) + " has id " +
                                                       std::to_string(trace.catalog[i].id));
    }
  }
  const std::size_t m = trace.catalog.size();
  for (std::size_t t = 0; t < trace.frames.size(); ++t) {
    const auto& frame = trace.frames[t];
    if (frame.frame_index != t) {
      throw InvariantError(invariant::kFrameOrder, "position " + std::to_string(t) + " holds frame " +
                                                       std::to_string(frame.frame_index));
    }
    if (frame.similarities.size() != m) {
      throw InvariantError(invariant::kArity, "frame " + std::to_string(t) + " has " +
                                                  std::to_string(frame.similarities.size()) +
                                                  " scores, catalog has " + std::to_string(m));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double s = frame.similarities[j];
      // Negated comparison so NaN is rejected too.
      if (!(s > 0.0 && s <= 1.0)) {
        throw InvariantError(invariant::kRange, "frame " + std::to_string(t) + ", prototype " +
                                                    std::to_string(j) + ": " + std::to_string(s));
      }
    }
  }
}

namespace {

Label label_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = detail::require_field(obj, key, line);
  if (!v.is_string()) throw FormatError(line, std::string("field '") + key + "' must be a string");
  auto label = parse_label(v.get<std::string>());
  if (!label) throw FormatError(line, "unknown class label '" + v.get<std::string>() + "'");
  return *label;
}

std::size_t index_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = detail::require_field(obj, key, line);
  if (!v.is_number_unsigned()) {
    throw FormatError(line, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(line, e.what());
  }
}

} // namespace

Trace parse_trace(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) throw FormatError(1, "missing header line");
  ++line;

  const json header = parse_line(text, line);
  const auto& version = detail::require_field(header, "version", line);
  if (version != "1") throw FormatError(line, "unsupported trace version " + version.dump());

  Trace trace;
  const auto& vid = detail::require_field(header, "video_id", line);
  if (!vid.is_string()) throw FormatError(line, "field 'video_id' must be a string");
  trace.video_id = vid.get<std::string>();
  const std::size_t declared_length = index_field(header, "T_V", line);
  trace.ground_truth = label_field(header, "ground_truth", line);
  trace.predicted = label_field(header, "predicted", line);

  const auto& catalog = detail::require_field(header, "catalog", line);
  if (!catalog.is_array()) throw FormatError(line, "field 'catalog' must be an array");
  for (const auto& entry : catalog) {
    trace.catalog.push_back({index_field(entry, "id", line), label_field(entry, "class", line)});
  }

  while (std::getline(in, text)) {
    ++line;
    if (text.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const json record = parse_line(text, line);
    FrameRecord frame;
    frame.frame_index = index_field(record, "frame_index", line);
    const auto& sims = detail::require_field(record, "similarities", line);
    if (!sims.is_array()) throw FormatError(line, "field 'similarities' must be an array");
    frame.similarities.reserve(sims.size());
    for (const auto& s : sims) {
      if (!s.is_number()) throw FormatError(line, "similarities must be numbers");
      frame.similarities.push_back(s.get<double>());
    }
    trace.frames.push_back(std::move(frame));
  }

  validate(trace);
  if (declared_length != trace.frames.size()) {
    throw InvariantError(invariant::kLengthMismatch, "header says " + std::to_string(declared_length) +
                                                         ", file has " +
                                                         std::to_string(trace.frames.size()));
  }
  return trace;
}

std::string format_trace(const Trace& trace) {
  validate(trace);

  json catalog = json::array();
  for (const auto& p : trace.catalog) {
    catalog.push_back({{"id", p.id}, {"class", std::string(to_string(p.class_label))}});
  }
  const json header = {
      {"version", "1"},
      {"video_id", trace.video_id},
      {"T_V", trace.length()},
      {"ground_truth", std::string(to_string(trace.ground_truth))},
      {"predicted", std::string(to_string(trace.predicted))},
      {"catalog", std::move(catalog)},
  };

  std::string out = detail::dump_canonical(header);
  out += '\n';
  for (const auto& frame : trace.frames) {
    json sims = json::array();
    for (double s : frame.similarities) sims.push_back(s);
    out += detail::dump_canonical({{"frame_index", frame.frame_index}, {"similarities", std::move(sims)}});
    out += '\n';
  }
  return out;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file " + path.string());
  return parse_trace(in);
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  const std::string text = format_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

} // namespace proto_tqtl
