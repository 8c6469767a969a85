#include "cli_support.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace lagcarma::cli {

Sink::Sink(const std::string& path) : out_(&std::cout) {
  if (path.empty()) return;
  file_ = std::make_unique<std::ofstream>(path);
  if (!*file_) throw UsageError("--output", "cannot open " + path + " for writing");
}

CsvWriter::CsvWriter(std::ostream& os, int digits) : os_(os) { os_ << std::setprecision(digits); }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << values[i];
  os_ << '\n';
}

void CsvWriter::comment(const std::string& text) { os_ << "# " << text << '\n'; }

namespace {

std::vector<double> split_triplet(const std::string& text, const std::string& flag, const char* shape) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag, std::string("expected ") + shape + ", got '" + text + "'");
    }
  }
  if (out.size() != 3) throw UsageError(flag, std::string("expected ") + shape + ", got '" + text + "'");
  return out;
}

}  // namespace

std::vector<double> parse_step_grid(const std::string& text, const std::string& flag) {
  const auto v = split_triplet(text, flag, "LO:HI:STEP");
  if (!(v[2] > 0.0) || !(v[1] >= v[0])) throw UsageError(flag, "need HI >= LO and STEP > 0");
  const auto count = static_cast<long>(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
  if (count > 1000000) throw UsageError(flag, "grid has more than 10^6 points");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
  return out;
}

std::vector<double> parse_count_grid(const std::string& text, const std::string& flag) {
  const auto v = split_triplet(text, flag, "LO:HI:COUNT");
  const double count = v[2];
  if (!(count >= 1.0) || count != std::floor(count) || !(v[1] >= v[0])) {
    throw UsageError(flag, "need HI >= LO and a positive integer COUNT");
  }
  const int n = static_cast<int>(count);
  if (n == 1) return {v[0]};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(v[0] + (v[1] - v[0]) * i / (n - 1));
  return out;
}

void LawFlags::attach(CLI::App* app) {
  app->add_option("--law", family, "Mixing law: gamma, inverse_gaussian (ig), gig, degenerate")->capture_default_str();
  app->add_option("--shape", shape, "Gamma shape")->capture_default_str();
  app->add_option("--rate", rate, "Gamma rate")->capture_default_str();
  app->add_option("--a", a, "IG/GIG parameter a")->capture_default_str();
  app->add_option("--b", b, "IG/GIG parameter b")->capture_default_str();
  app->add_option("--p", p, "GIG index p")->capture_default_str();
  app->add_option("--value", value, "Degenerate law level")->capture_default_str();
}

MixingLaw LawFlags::build() const {
  LawFamily fam;
  try {
    fam = parse_law_family(family == "ig" ? "inverse_gaussian" : family);
  } catch (const std::exception& ex) {
    throw UsageError("--law", ex.what());
  }
  try {
    switch (fam) {
      case LawFamily::gamma:
        return MixingLaw::gamma(shape, rate);
      case LawFamily::inverse_gaussian:
        return MixingLaw::inverse_gaussian(a, b);
      case LawFamily::gig:
        return MixingLaw::gig(a, b, p);
      case LawFamily::degenerate:
        return MixingLaw::degenerate(value);
    }
  } catch (const std::invalid_argument& ex) {
    throw UsageError("--law", ex.what());
  }
  throw UsageError("--law", "unsupported family");
}

}  // namespace lagcarma::cli
