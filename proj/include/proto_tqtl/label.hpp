#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace proto_tqtl {

/// Video / prototype class. FAKE is the positive class.
enum class Label : std::uint8_t { Real = 0, Fake = 1 };

inline constexpr std::size_t kNumClasses = 2;

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }
constexpr Label label_at(std::size_t k) { return k == 0 ? Label::Real : Label::Fake; }
constexpr Label opposite(Label l) { return l == Label::Real ? Label::Fake : Label::Real; }

std::string_view to_string(Label l);

/// Accepts the canonical spellings "REAL" and "FAKE".
std::optional<Label> parse_label(std::string_view text);

} // namespace proto_tqtl
