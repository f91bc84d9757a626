#include "json_io.hpp"

#include "proto_tqtl/error.hpp"

#include <cmath>
#include <cstdio>

namespace proto_tqtl::detail {

std::string format_real(double v) {
  if (!std::isfinite(v)) throw Error("cannot serialize non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_into(const nlohmann::json& j, std::string& out) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(key).dump();
        out += ':';
        dump_into(value, out);
      }
      out += '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::number_float: out += format_real(j.get<double>()); break;
    default: out += j.dump(); break;
  }
}

} // namespace

std::string dump_canonical(const nlohmann::json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

const nlohmann::json& require_field(const nlohmann::json& obj, const char* key, std::size_t line) {
  if (!obj.is_object()) throw FormatError(line, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(line, std::string("missing field '") + key + "'");
  return *it;
}

} // namespace proto_tqtl::detail
