#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mledr::cli {

/// Owns the output directory: every file goes through write(), and the
/// manifest listing them is written last.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }

  /// Writes `name` (a bare file name) via a temporary and a rename.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body);

  /// Runs fn and records its wall-clock duration under `phase`.
  void timed(const std::string& phase, const std::function<void()>& fn);

  nlohmann::json& extra() { return extra_; }
  const std::vector<std::string>& files() const { return files_; }

  void write_manifest(const std::string& command, const std::filesystem::path& configPath,
                      const nlohmann::json& resolved);

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  nlohmann::json timings_ = nlohmann::json::object();
  nlohmann::json extra_ = nlohmann::json::object();
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart, logarithmic y axis; non-positive values are
/// dropped.
void write_svg_chart(std::ostream& out, const std::string& title, const std::string& xLabel,
                     const std::vector<Series>& series);

}  // namespace mledr::cli
