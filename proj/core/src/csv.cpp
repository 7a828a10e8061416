#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mledr/error.hpp"
#include "mledr/montecarlo.hpp"

namespace mledr {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void write_qn_csv(std::ostream& out, const std::vector<QnEstimate>& estimates, std::uint64_t masterSeed) {
  out << "# masterSeed=" << masterSeed << '\n';
  out << "n,hits,reps,pHat,wilsonLow,wilsonHigh\n";
  out.precision(17);
  for (const auto& e : estimates)
    out << e.n << ',' << e.hits << ',' << e.replications << ',' << e.pHat << ',' << e.wilsonLow << ','
        << e.wilsonHigh << '\n';
}

std::vector<QnEstimate> read_qn_csv(std::istream& in) {
  std::vector<QnEstimate> out;
  std::string line;
  bool header = false;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cells = split(line);
    if (!header) {
      if (cells.size() < 6 || cells[0] != "n" || cells[1] != "hits" || cells[2] != "reps")
        throw ConfigError("qn csv line " + std::to_string(lineNo) + ": expected header n,hits,reps,pHat,...");
      header = true;
      continue;
    }
    if (cells.size() < 6) throw ConfigError("qn csv line " + std::to_string(lineNo) + ": expected 6 columns");
    try {
      QnEstimate e;
      e.n = std::stol(cells[0]);
      e.hits = std::stol(cells[1]);
      e.replications = std::stol(cells[2]);
      e.pHat = std::stod(cells[3]);
      e.wilsonLow = std::stod(cells[4]);
      e.wilsonHigh = std::stod(cells[5]);
      if (e.replications <= 0 || e.hits < 0 || e.hits > e.replications) throw std::invalid_argument("counts");
      out.push_back(e);
    } catch (const std::exception&) {
      throw ConfigError("qn csv line " + std::to_string(lineNo) + ": malformed numeric field");
    }
  }
  if (!header) throw ConfigError("qn csv: missing header row");
  return out;
}

void write_wn_csv(std::ostream& out, const std::vector<WnEstimate>& estimates, double u, std::uint64_t masterSeed) {
  out << "# masterSeed=" << masterSeed << '\n';
  out << "# u=" << u << '\n';
  out << "n,reps,W,V1,V2,wHits,v1Hits,v2Hits\n";
  out.precision(17);
  for (const auto& e : estimates)
    out << e.n << ',' << e.replications << ',' << e.w << ',' << e.v1 << ',' << e.v2 << ',' << e.wHits << ','
        << e.v1Hits << ',' << e.v2Hits << '\n';
}

void write_rates_csv(std::ostream& out, const RateFitSummary& summary) {
  out << "# selection: highest R^2 in transformed coordinates, margin 0.01, ties to the simpler model\n";
  if (!summary.excluded.empty()) {
    out << "# excluded n:";
    for (long n : summary.excluded) out << ' ' << n;
    out << '\n';
  }
  out << "model,intercept,parameter,rSquared,selected\n";
  out.precision(12);
  for (const auto& f : summary.fits)
    out << to_string(f.model) << ',' << f.intercept << ',' << f.parameter << ',' << f.rSquared << ','
        << (f.selected ? 1 : 0) << '\n';
}

void write_plotdata_csv(std::ostream& out, const RateFitSummary& summary) {
  out << "model,x,y,fitted\n";
  out.precision(12);
  for (const auto& f : summary.fits) {
    const double slope = f.model == RateModel::Polynomial ? -f.parameter : f.parameter;
    for (std::size_t i = 0; i < f.x.size(); ++i)
      out << to_string(f.model) << ',' << f.x[i] << ',' << f.y[i] << ',' << f.intercept + slope * f.x[i] << '\n';
  }
}

}  // namespace mledr
