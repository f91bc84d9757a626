#pragma once

#include "proto_tqtl/label.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace proto_tqtl {

struct PrototypeMeta {
  std::size_t id = 0;
  Label class_label = Label::Real;

  bool operator==(const PrototypeMeta&) const = default;
};

/// One time-step: the pooled similarity of every prototype to this frame.
struct FrameRecord {
  std::size_t frame_index = 0;
  std::vector<double> similarities;

  bool operator==(const FrameRecord&) const = default;
};

/// A video viewed as a data stream of prototype-similarity vectors.
///
/// The trace length T_V is `frames.size()`; the file header carries it
/// explicitly and the reader checks the two agree.
struct Trace {
  std::string video_id;
  std::vector<FrameRecord> frames;
  Label ground_truth = Label::Real;
  Label predicted = Label::Real;
  std::vector<PrototypeMeta> catalog;

  std::size_t length() const noexcept { return frames.size(); }
  std::size_t num_prototypes() const noexcept { return catalog.size(); }

  double similarity(std::size_t frame, std::size_t proto) const {
    return frames[frame].similarities[proto];
  }

  bool operator==(const Trace&) const = default;
};

/// Throws InvariantError naming the first violated invariant.
void validate(const Trace& trace);

Trace parse_trace(std::istream& in);
std::string format_trace(const Trace& trace);

Trace read_trace(const std::filesystem::path& path);
void write_trace(const Trace& trace, const std::filesystem::path& path);

namespace invariant {
inline constexpr const char* kEmptyTrace = "trace length must be >= 1";
inline constexpr const char* kFrameOrder = "frame indices must be 0..T_V-1 in order";
inline constexpr const char* kArity = "similarity arity mismatch";
inline constexpr const char* kRange = "similarity out of range";
inline constexpr const char* kCatalogIds = "catalog ids must be unique and contiguous from 0";
inline constexpr const char* kLengthMismatch = "frame count does not match T_V";
} // namespace invariant

} // namespace proto_tqtl
