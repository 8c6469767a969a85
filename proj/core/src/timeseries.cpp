#include "lagcarma/timeseries.hpp"

#include "lagcarma/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace lagcarma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_field(const std::string& field, long line) {
  const std::string f = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
    throw DataError("line " + std::to_string(line) + ": cannot parse number '" + f + "'", line);
  }
  return v;
}

}  // namespace

TimeSeries load_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string(), 0);
  std::string row;
  long line = 0;
  bool header = false;
  TimeSeries out;
  while (std::getline(in, row)) {
    ++line;
    const std::string r = trim(row);
    if (r.empty()) continue;
    if (!header) {
      std::string compact;
      for (char c : r)
        if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != "t,y") throw DataError("line " + std::to_string(line) + ": expected header 't,y'", line);
      header = true;
      continue;
    }
    const auto comma = r.find(',');
    if (comma == std::string::npos || r.find(',', comma + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(line) + ": expected two comma-separated fields", line);
    }
    const double t = parse_field(r.substr(0, comma), line);
    const double y = parse_field(r.substr(comma + 1), line);
    if (!std::isfinite(t) || !std::isfinite(y)) {
      throw DataError("line " + std::to_string(line) + ": non-finite value", line);
    }
    if (!out.empty() && !(t > out.back().t)) {
      throw DataError("line " + std::to_string(line) + ": time " + trim(r.substr(0, comma)) +
                          " is not strictly increasing",
                      line);
    }
    out.push_back({t, y});
  }
  if (!header) throw DataError("missing header 't,y' in " + path.string(), 0);
  return out;
}

void save_timeseries(const std::filesystem::path& path, std::span<const Observation> data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string(), 0);
  out.precision(17);
  out << "t,y\n";
  for (const auto& o : data) out << o.t << ',' << o.y << '\n';
  if (!out) throw DataError("write failed for " + path.string(), 0);
}

void require_increasing_times(std::span<const Observation> data, const char* caller) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].t) || !std::isfinite(data[i].y)) {
      throw std::invalid_argument(std::string(caller) + ": non-finite observation");
    }
    if (i > 0 && !(data[i].t > data[i - 1].t)) {
      throw std::invalid_argument(std::string(caller) + ": times must be strictly increasing");
    }
  }
}

}  // namespace lagcarma
