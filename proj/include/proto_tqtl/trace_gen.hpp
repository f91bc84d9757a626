#pragma once

#include "proto_tqtl/proto/core.hpp"
#include "proto_tqtl/trace.hpp"

#include <span>
#include <string>

namespace proto_tqtl {

/// How per-frame similarity vectors combine into the video-level score
/// vector that the classifier head sees.
enum class Aggregation { Mean, Sum };

struct TraceMetadata {
  std::string video_id;
  Label ground_truth = Label::Real;
  Aggregation aggregation = Aggregation::Mean;
};

/// Scores every clip (one per frame) with the prototype layer. The predicted
/// label is the argmax of the head applied to the aggregated scores.
Trace generate_trace(std::span<const proto::LatentClip> clips, const proto::PrototypeBank& bank,
                     const TraceMetadata& meta);

} // namespace proto_tqtl
