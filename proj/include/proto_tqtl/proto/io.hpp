#pragma once

#include "proto_tqtl/proto/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace proto_tqtl::proto {

// Both formats are line-oriented JSON with canonical float formatting:
//
//   model:    {"C":..,"fc_weights":[[..],[..]],"m":..,"version":"1"}
//             {"class":"REAL","grounding":{"clip":..,"col":..,"row":..},"id":0,"vector":[..]}
//             ... one line per prototype; "grounding" is omitted when absent
//
//   dataset:  {"C":..,"H":..,"W":..,"clips":N,"version":"1"}
//             {"label":"FAKE","patches":[.. H*W*C values, row-major ..]}
//             ... one line per clip

std::string format_model(const PrototypeBank& bank);
PrototypeBank parse_model(std::istream& in);
PrototypeBank read_model(const std::filesystem::path& path);
void write_model(const PrototypeBank& bank, const std::filesystem::path& path);

std::string format_dataset(const std::vector<LatentClip>& clips);
std::vector<LatentClip> parse_dataset(std::istream& in);
std::vector<LatentClip> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::vector<LatentClip>& clips, const std::filesystem::path& path);

} // namespace proto_tqtl::proto
