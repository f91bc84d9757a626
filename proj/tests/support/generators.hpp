#pragma once

// Random formulas and traces for property tests.

#include "proto_tqtl/proto/core.hpp"
#include "proto_tqtl/tqtl/ast.hpp"
#include "proto_tqtl/trace.hpp"

#include <random>
#include <string>
#include <vector>

namespace proto_tqtl::testing {

using Rng = std::mt19937_64;

struct FormulaShape {
  int max_depth = 5;
  /// Emit And / Implies / Eventually / Always / Forall as well as core nodes.
  bool sugar = false;
};

/// Closed formula: every variable it mentions is bound. Core-only unless
/// shape.sugar is set.
tqtl::Formula random_formula(Rng& rng, const FormulaShape& shape = {});

/// Possibly open formula with arbitrary structure, for print/parse tests.
tqtl::Formula random_any_formula(Rng& rng, int max_depth = 5);

/// Scores uniform in (0, 1]. At least one prototype of each class when
/// m >= 2.
Trace random_trace(Rng& rng, std::size_t length, std::size_t num_prototypes);

/// Scores whose opposite-class values hover around the 0.4 ceiling with
/// small frame-to-frame steps, so both non-relevance specs are exercised
/// on both sides of their thresholds.
Trace random_nonrelevance_trace(Rng& rng, std::size_t length, std::size_t num_prototypes);

/// Clip with entries uniform in [-1, 1].
proto::LatentClip random_clip(Rng& rng, std::size_t h, std::size_t w, std::size_t c, Label label);

/// Bank with `per_class` prototypes per class, entries in [-1, 1], and fc
/// weights in [-1, 1].
proto::PrototypeBank random_bank(Rng& rng, std::size_t c, std::size_t per_class);

} // namespace proto_tqtl::testing
