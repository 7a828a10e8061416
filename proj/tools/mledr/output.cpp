#include "mledr/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mledr/error.hpp"

namespace mledr::cli {

namespace fs = std::filesystem;

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputDir::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (name.find('/') != std::string::npos || name.empty() || name[0] == '.')
    throw Error("refusing to write '" + name + "' outside the output directory");
  const fs::path target = dir_ / name;
  const fs::path tmp = dir_ / ("." + name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    body(out);
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputDir::timed(const std::string& phase, const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  timings_[phase] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void OutputDir::write_manifest(const std::string& command, const fs::path& configPath, const nlohmann::json& resolved) {
  nlohmann::json m;
  m["tool"] = "mledr";
  m["version"] = MLEDR_VERSION;
  m["command"] = command;
  m["config"] = configPath.string();
  m["output_dir"] = dir_.string();
  m["resolved"] = resolved;
  m["files"] = files_;
  m["timings_seconds"] = timings_;
  for (auto it = extra_.begin(); it != extra_.end(); ++it) m[it.key()] = it.value();
  const std::string name = "manifest.json";
  const fs::path tmp = dir_ / ".manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << m.dump(2) << '\n';
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, dir_ / name);
}

void write_svg_chart(std::ostream& out, const std::string& title, const std::string& xLabel,
                     const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 160, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  double xMin = std::numeric_limits<double>::infinity(), xMax = -xMin, yMin = xMin, yMax = -xMin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      xMin = std::min(xMin, s.x[i]);
      xMax = std::max(xMax, s.x[i]);
      yMin = std::min(yMin, std::log10(s.y[i]));
      yMax = std::max(yMax, std::log10(s.y[i]));
    }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  if (!(xMax >= xMin)) {
    out << "</svg>\n";
    return;
  }
  if (xMax == xMin) xMax = xMin + 1.0;
  yMin = std::floor(yMin);
  yMax = std::max(std::ceil(yMax), yMin + 1.0);
  auto px = [&](double x) { return L + (x - xMin) / (xMax - xMin) * (W - L - R); };
  auto py = [&](double ly) { return T + (yMax - ly) / (yMax - yMin) * (H - T - B); };
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = yMin; e <= yMax; e += 1.0)
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  out << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\">" << xMin << "</text>\n"
      << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">" << xMax << "</text>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xLabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 7];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.y[i] > 0.0 && std::isfinite(s.y[i])) pts << px(s.x[i]) << ',' << py(std::log10(s.y[i])) << ' ';
    out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    out << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 14 * (k + 1) << "\" fill=\"" << c << "\">" << s.name
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace mledr::cli
