#include "proto_tqtl/proto/io.hpp"

#include "json_io.hpp"
#include "proto_tqtl/error.hpp"

#include <fstream>
#include <istream>

namespace proto_tqtl::proto {

using nlohmann::json;

namespace {

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(line, e.what());
  }
}

std::size_t count_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = detail::require_field(obj, key, line);
  if (!v.is_number_unsigned()) throw FormatError(line, std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

Label label_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = detail::require_field(obj, key, line);
  auto label = v.is_string() ? parse_label(v.get<std::string>()) : std::nullopt;
  if (!label) throw FormatError(line, std::string("field '") + key + "' must be REAL or FAKE");
  return *label;
}

Vector real_array(const json& v, const char* what, std::size_t line) {
  if (!v.is_array()) throw FormatError(line, std::string(what) + " must be an array");
  Vector out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw FormatError(line, std::string(what) + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json real_json(const Vector& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

void check_version(const json& header, std::size_t line) {
  if (detail::require_field(header, "version", line) != "1") throw FormatError(line, "unsupported version");
}

/// Reads the next non-terminal line; false at end of input.
bool next_line(std::istream& in, std::string& text, std::size_t& line) {
  if (!std::getline(in, text)) return false;
  ++line;
  if (text.empty() && in.peek() == std::char_traits<char>::eof()) return false;
  return true;
}

template <class T, class Fmt>
void write_file(const T& value, const std::filesystem::path& path, Fmt fmt) {
  const std::string text = fmt(value);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

} // namespace

std::string format_model(const PrototypeBank& bank) {
  bank.validate();
  json fc = json::array();
  for (std::size_t k = 0; k < bank.fc.rows; ++k) {
    Vector row(bank.fc.values.begin() + static_cast<std::ptrdiff_t>(k * bank.fc.cols),
               bank.fc.values.begin() + static_cast<std::ptrdiff_t>((k + 1) * bank.fc.cols));
    fc.push_back(real_json(row));
  }
  std::string out =
      detail::dump_canonical({{"version", "1"}, {"C", bank.dim}, {"m", bank.size()}, {"fc_weights", std::move(fc)}});
  out += '\n';
  for (std::size_t j = 0; j < bank.size(); ++j) {
    const auto& p = bank.prototypes[j];
    json rec = {{"id", j}, {"class", std::string(to_string(p.label))}, {"vector", real_json(p.vector)}};
    if (p.grounding) {
      rec["grounding"] = {{"clip", p.grounding->clip}, {"row", p.grounding->row}, {"col", p.grounding->col}};
    }
    out += detail::dump_canonical(rec);
    out += '\n';
  }
  return out;
}

PrototypeBank parse_model(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  if (!next_line(in, text, line)) throw FormatError(1, "missing header line");
  const json header = parse_line(text, line);
  check_version(header, line);

  PrototypeBank bank;
  bank.dim = count_field(header, "C", line);
  const std::size_t m = count_field(header, "m", line);
  const auto& fc = detail::require_field(header, "fc_weights", line);
  if (!fc.is_array() || fc.size() != kNumClasses) throw FormatError(line, "fc_weights must have 2 rows");
  bank.fc = Matrix::zeros(kNumClasses, m);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const Vector row = real_array(fc[k], "fc_weights row", line);
    if (row.size() != m) throw FormatError(line, "fc_weights row length must equal m");
    for (std::size_t j = 0; j < m; ++j) bank.fc(k, j) = row[j];
  }

  while (next_line(in, text, line)) {
    const json rec = parse_line(text, line);
    if (count_field(rec, "id", line) != bank.prototypes.size()) throw FormatError(line, "prototype ids must be 0..m-1 in order");
    Prototype p;
    p.label = label_field(rec, "class", line);
    p.vector = real_array(detail::require_field(rec, "vector", line), "vector", line);
    if (auto it = rec.find("grounding"); it != rec.end()) {
      p.grounding = Grounding{count_field(*it, "clip", line), count_field(*it, "row", line), count_field(*it, "col", line)};
    }
    bank.prototypes.push_back(std::move(p));
  }
  if (bank.prototypes.size() != m) throw FormatError(line, "expected " + std::to_string(m) + " prototypes");
  bank.validate();
  return bank;
}

PrototypeBank read_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_model(in);
}

void write_model(const PrototypeBank& bank, const std::filesystem::path& path) { write_file(bank, path, format_model); }

std::string format_dataset(const std::vector<LatentClip>& clips) {
  if (clips.empty()) throw Error("dataset is empty");
  const auto& first = clips.front();
  std::string out = detail::dump_canonical(
      {{"version", "1"}, {"C", first.dim()}, {"H", first.height()}, {"W", first.width()}, {"clips", clips.size()}});
  out += '\n';
  for (const auto& clip : clips) {
    if (clip.dim() != first.dim() || clip.height() != first.height() || clip.width() != first.width()) {
      throw DimensionError("all clips in a dataset must share H, W, C");
    }
    out += detail::dump_canonical({{"label", std::string(to_string(clip.label()))}, {"patches", real_json(clip.data())}});
    out += '\n';
  }
  return out;
}

std::vector<LatentClip> parse_dataset(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  if (!next_line(in, text, line)) throw FormatError(1, "missing header line");
  const json header = parse_line(text, line);
  check_version(header, line);
  const std::size_t c = count_field(header, "C", line);
  const std::size_t h = count_field(header, "H", line);
  const std::size_t w = count_field(header, "W", line);
  const std::size_t n = count_field(header, "clips", line);

  std::vector<LatentClip> clips;
  clips.reserve(n);
  while (next_line(in, text, line)) {
    const json rec = parse_line(text, line);
    const Label label = label_field(rec, "label", line);
    Vector data = real_array(detail::require_field(rec, "patches", line), "patches", line);
    try {
      clips.emplace_back(h, w, c, std::move(data), label);
    } catch (const InvariantError& e) {
      throw FormatError(line, e.what());
    }
  }
  if (clips.size() != n) throw FormatError(line, "expected " + std::to_string(n) + " clips, found " + std::to_string(clips.size()));
  return clips;
}

std::vector<LatentClip> read_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dataset(in);
}

void write_dataset(const std::vector<LatentClip>& clips, const std::filesystem::path& path) {
  write_file(clips, path, format_dataset);
}

} // namespace proto_tqtl::proto
