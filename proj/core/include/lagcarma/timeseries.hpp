#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace lagcarma {

struct Observation {
  double t;
  double y;
};

using TimeSeries = std::vector<Observation>;

/// Reads a `t,y` CSV. Requires the header and strictly increasing times;
/// throws DataError naming the offending line.
TimeSeries load_timeseries(const std::filesystem::path& path);

/// Writes `t,y` with round-trip precision.
void save_timeseries(const std::filesystem::path& path, std::span<const Observation> data);

/// Throws std::invalid_argument unless times are finite and strictly increasing.
void require_increasing_times(std::span<const Observation> data, const char* caller);

}  // namespace lagcarma
