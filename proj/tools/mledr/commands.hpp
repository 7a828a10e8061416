#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace mledr::cli {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> overlay;
  bool svg = false;
};

/// Each command throws ConfigError for bad input and other mledr::Error types
/// for runtime failures; the caller maps them to exit codes.
void cmd_simulate(const std::filesystem::path& config, const Overrides& o, std::ostream& log);
void cmd_rates(const std::filesystem::path& qnCsv, const Overrides& o, std::ostream& log);
void cmd_divergence(const std::filesystem::path& config, const Overrides& o, std::ostream& log);
void cmd_bounds(const std::filesystem::path& config, const Overrides& o, std::ostream& log);

}  // namespace mledr::cli
