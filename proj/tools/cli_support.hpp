#pragma once

#include "lagcarma/mixing.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lagcarma::cli {

// Invalid flag value detected after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

inline constexpr int kMachineDigits = 17;
inline constexpr int kTableDigits = 5;

/// Destination chosen by the global --output flag (stdout when empty).
class Sink {
 public:
  explicit Sink(const std::string& path);
  std::ostream& stream() { return file_ ? *file_ : *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

/// Comma-separated row writer with fixed significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, int digits);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void comment(const std::string& text);

 private:
  std::ostream& os_;
};

/// `LO:HI:STEP` inclusive arithmetic grid.
std::vector<double> parse_step_grid(const std::string& text, const std::string& flag);

/// `LO:HI:COUNT` with COUNT equally spaced points including both ends.
std::vector<double> parse_count_grid(const std::string& text, const std::string& flag);

/// Mixing-law flags shared by the nvmm subcommands.
struct LawFlags {
  std::string family = "gamma";
  double shape = 1.0;
  double rate = 1.0;
  double a = 1.0;
  double b = 1.0;
  double p = 0.5;
  double value = 1.0;

  void attach(CLI::App* app);
  MixingLaw build() const;
};

}  // namespace lagcarma::cli
