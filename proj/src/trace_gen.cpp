#include "proto_tqtl/trace_gen.hpp"

#include "proto_tqtl/error.hpp"

namespace proto_tqtl {

Trace generate_trace(std::span<const proto::LatentClip> clips, const proto::PrototypeBank& bank,
                     const TraceMetadata& meta) {
  if (clips.empty()) throw InvariantError(invariant::kEmptyTrace, "no clips");
  bank.validate();

  Trace trace;
  trace.video_id = meta.video_id;
  trace.ground_truth = meta.ground_truth;
  for (std::size_t j = 0; j < bank.size(); ++j) trace.catalog.push_back({j, bank.prototypes[j].label});

  proto::Vector pooled(bank.size(), 0.0);
  for (std::size_t t = 0; t < clips.size(); ++t) {
    proto::Vector scores = proto::prototype_layer(clips[t], bank);
    for (std::size_t j = 0; j < scores.size(); ++j) pooled[j] += scores[j];
    trace.frames.push_back({t, std::move(scores)});
  }
  if (meta.aggregation == Aggregation::Mean) {
    for (double& v : pooled) v /= static_cast<double>(clips.size());
  }
  trace.predicted = proto::argmax_class(proto::predict(pooled, bank));
  validate(trace);
  return trace;
}

} // namespace proto_tqtl
