#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "riesz/grid.hpp"

namespace riesz {

/// Writes content to path through a sibling temporary file and a rename,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// CSV body "index,re,im" with one row per flat lattice index (see GridSpec).
std::string field_to_csv(const Field& f);

/// JSON manifest describing the grid and domain tag of a field dump.
std::string field_manifest_json(const Field& f);

/// Writes <stem>.csv and <stem>.json.
void dump_field(const Field& f, const std::filesystem::path& stem);

/// Reads a dump produced by dump_field. Throws UsageError on malformed input.
Field load_field(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

/// Shortest round-trippable decimal representation used by every CSV writer.
std::string format_number(double v);

}  // namespace riesz
