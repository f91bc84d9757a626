#pragma once

// Canonical JSON emission shared by the trace, model and dataset writers:
// object keys sorted, no whitespace, floats with 17 significant digits.

#include <json.hpp>

#include <string>

namespace proto_tqtl::detail {

std::string format_real(double v);

std::string dump_canonical(const nlohmann::json& j);

/// Field access that reports the file line on failure.
const nlohmann::json& require_field(const nlohmann::json& obj, const char* key, std::size_t line);

} // namespace proto_tqtl::detail
