#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <string>

namespace proto_tqtl::tqtl {

/// Extended-real quality value: -inf, a finite real, or +inf.
///
/// Only negation, max, min and ordering exist; the semantics never adds two
/// quality values, so +inf and -inf never meet in arithmetic. NaN is not a
/// representable state.
class Robustness {
 public:
  static constexpr Robustness pos_inf() { return Robustness(std::numeric_limits<double>::infinity()); }
  static constexpr Robustness neg_inf() { return Robustness(-std::numeric_limits<double>::infinity()); }
  static Robustness finite(double v);
  static constexpr Robustness from_bool(bool b) { return b ? pos_inf() : neg_inf(); }

  constexpr bool is_pos_inf() const { return value_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_neg_inf() const { return value_ == -std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_pos_inf() && !is_neg_inf(); }

  /// The value as a double, with infinities mapped to IEEE infinities.
  constexpr double value() const { return value_; }

  constexpr Robustness operator-() const { return Robustness(-value_); }

  friend constexpr bool operator==(Robustness a, Robustness b) { return a.value_ == b.value_; }
  friend constexpr std::partial_ordering operator<=>(Robustness a, Robustness b) {
    return a.value_ <=> b.value_;
  }

  /// Bit-level identity; distinguishes +0.0 from -0.0.
  bool identical(Robustness other) const;

  std::string to_string() const;

 private:
  constexpr explicit Robustness(double v) : value_(v) {}
  double value_;
};

inline Robustness max(Robustness a, Robustness b) { return a < b ? b : a; }
inline Robustness min(Robustness a, Robustness b) { return b < a ? b : a; }

} // namespace proto_tqtl::tqtl
