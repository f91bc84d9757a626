#pragma once

// Independent reference implementations for the prototype layer and losses.
// Plain loops over every (clip, patch, prototype) triple; nothing shared
// with the library beyond the data types.

#include "proto_tqtl/proto/core.hpp"

#include <vector>

namespace proto_tqtl::testing {

struct OracleLosses {
  double ce = 0.0;
  double clus = 0.0;
  double sep = 0.0;
  double div = 0.0;
  double total = 0.0;
};

std::vector<double> oracle_scores(const proto::LatentClip& clip, const proto::PrototypeBank& bank);

OracleLosses oracle_losses(const std::vector<proto::LatentClip>& batch, const proto::PrototypeBank& bank,
                           const proto::TrainConfig& cfg);

/// Central finite differences of the total loss, step h, in the layout of
/// proto::Gradients.
proto::Gradients finite_difference(const std::vector<proto::LatentClip>& batch, const proto::PrototypeBank& bank,
                                   const proto::TrainConfig& cfg, double h);

/// Smallest gap between a selected max/min and its runner-up, and between
/// any same-class cosine and s_max. Finite differences are only meaningful
/// when this is well above the step.
double selection_margin(const std::vector<proto::LatentClip>& batch, const proto::PrototypeBank& bank,
                        double s_max);

/// max |a - b| / max(|a|_inf, |b|_inf) over one tensor.
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

} // namespace proto_tqtl::testing
