#include "lagcarma/errors.hpp"
#include "lagcarma/model_file.hpp"
#include "lagcarma/timeseries.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace lagcarma;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("lagcarma_io_" + name);
  std::ofstream(path) << contents;
  return path;
}

long data_error_line(const std::string& contents) {
  try {
    load_timeseries(temp_file("bad.csv", contents));
  } catch (const DataError& e) {
    return e.line();
  }
  return -1;
}

long model_error_line(const std::string& text) {
  try {
    parse_model(text);
  } catch (const DataError& e) {
    return e.line();
  }
  return -1;
}

const std::string kModel =
    "# CARMA(2,1) with a Gamma clock\n"
    "p = 2\n"
    "q = 1\n"
    "a = [1.4, 0.5]\n"
    "b = 0.2, 1.0\n"
    "law.family = gamma\n"
    "law.shape = 1   # unit shape\n"
    "law.rate = 2\n"
    "x0 = 0.1, -0.2\n"
    "spot = 1.5\n";

}  // namespace

TEST(TimeSeriesIo, RoundTripsExactly) {
  const TimeSeries data = {{0.0, 0.1}, {0.5, -1.0 / 3.0}, {1.25, 1e-300}};
  const auto path = std::filesystem::temp_directory_path() / "lagcarma_io_roundtrip.csv";
  save_timeseries(path, data);
  const auto back = load_timeseries(path);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].t, data[i].t);
    EXPECT_EQ(back[i].y, data[i].y);
  }
}

TEST(TimeSeriesIo, ReportsOffendingLine) {
  EXPECT_EQ(data_error_line("t,y\n0,1\n1,2\n1,3\n"), 4);
  EXPECT_EQ(data_error_line("t,y\n0,1\n1,abc\n"), 3);
  EXPECT_EQ(data_error_line("t,y\n0,1,2\n"), 2);
  EXPECT_EQ(data_error_line("time,value\n0,1\n"), 1);
  EXPECT_EQ(data_error_line(""), 0);
  EXPECT_THROW(load_timeseries("/nonexistent/lagcarma.csv"), DataError);
}

TEST(TimeSeriesIo, SkipsBlankLinesAndWhitespace) {
  const auto data = load_timeseries(temp_file("ws.csv", " t , y \n\n0, 1\n 2 ,3\n"));
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[1].t, 2.0);
  EXPECT_EQ(data[1].y, 3.0);
}

TEST(TimeSeriesIo, RequireIncreasingTimes) {
  const TimeSeries bad = {{0.0, 1.0}, {0.0, 2.0}};
  EXPECT_THROW(require_increasing_times(bad, "test"), std::invalid_argument);
  const TimeSeries good = {{0.0, 1.0}, {0.1, 2.0}};
  EXPECT_NO_THROW(require_increasing_times(good, "test"));
}

TEST(ModelFile, ParsesAllFields) {
  const auto model = parse_model(kModel);
  EXPECT_EQ(model.spec.p(), 2);
  EXPECT_EQ(model.spec.q(), 1);
  EXPECT_DOUBLE_EQ(model.spec.ar_coeffs()[0], 1.4);
  EXPECT_DOUBLE_EQ(model.spec.ma_coeffs()[1], 1.0);
  EXPECT_DOUBLE_EQ(std::get<GammaLaw>(model.law.params()).rate, 2.0);
  EXPECT_DOUBLE_EQ(model.x0(1), -0.2);
  EXPECT_DOUBLE_EQ(model.spot, 1.5);
  EXPECT_DOUBLE_EQ(model.rate, 0.0);
}

TEST(ModelFile, FormatRoundTrips) {
  const auto model = parse_model(kModel);
  const auto again = parse_model(format_model(model));
  EXPECT_EQ(format_model(again), format_model(model));
  EXPECT_DOUBLE_EQ(again.x0(0), 0.1);
}

TEST(ModelFile, RejectsMalformedInput) {
  EXPECT_EQ(model_error_line(kModel + "colour = red\n"), 11);
  EXPECT_EQ(model_error_line(kModel + "spot = 2\n"), 11);
  EXPECT_EQ(model_error_line("a = 1\nb = x\nlaw.family = gamma\nlaw.shape = 1\nlaw.rate = 1\n"), 2);
  EXPECT_EQ(model_error_line("a = 1\nb = 1\nlaw.family = stable\n"), 3);
  EXPECT_EQ(model_error_line("a = 1\nb = 1\nno equals sign\n"), 3);
  EXPECT_EQ(model_error_line("p = 2\na = 1\nb = 1\nlaw.family = gamma\nlaw.shape = 1\nlaw.rate = 1\n"), 1);
  EXPECT_EQ(model_error_line("a = 1\nb = 1\nlaw.family = gamma\nlaw.shape = 1\n"), 0);
  EXPECT_THROW(load_model("/nonexistent/model.txt"), DataError);
}
