#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace riesz::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_assertion = 2;

inline constexpr int csv_schema_version = 1;

struct RunOptions {
  std::string command;
  std::filesystem::path config_path;
  std::vector<std::string> overrides;  // key=value, applied after the file
  std::filesystem::path out_dir = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& subcommands();

/// Validates the whole config, runs the subcommand and writes manifest.json,
/// <command>.csv and any field dumps into out_dir. Diagnostics go to err.
/// Returns exit_ok, exit_assertion (outputs written) or exit_usage (nothing written).
int run(const RunOptions& options, std::ostream& err);

}  // namespace riesz::cli
