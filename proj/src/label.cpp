#include "proto_tqtl/label.hpp"

#include "proto_tqtl/error.hpp"

namespace proto_tqtl {

std::string_view to_string(Label l) { return l == Label::Real ? "REAL" : "FAKE"; }

std::optional<Label> parse_label(std::string_view text) {
  if (text == "REAL") return Label::Real;
  if (text == "FAKE") return Label::Fake;
  return std::nullopt;
}

namespace {

std::string render_parse_error(const SourceSpan& span, const std::string& detail,
                               const std::vector<std::string>& expected) {
  std::string msg = std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + detail;
  if (!expected.empty()) {
    msg += " (expected ";
    if (expected.size() > 1) msg += "one of ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += ", ";
      msg += expected[i];
    }
    msg += ")";
  }
  return msg;
}

} // namespace

ParseError::ParseError(SourceSpan span, std::string detail, std::vector<std::string> expected)
    : Error(render_parse_error(span, detail, expected)),
      span_(span),
      detail_(std::move(detail)),
      expected_(std::move(expected)) {}

} // namespace proto_tqtl
