#include "lagcarma/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace lagcarma;

namespace {

struct SampleMoments {
  double mean;
  double var;
};

SampleMoments sample_moments(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= x.size();
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / (x.size() - 1)};
}

}  // namespace

TEST(Simulation, StreamsAreReproducibleAndDistinct) {
  auto a = make_stream(5, 0);
  auto b = make_stream(5, 0);
  auto c = make_stream(5, 1);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}

TEST(Simulation, GammaIncrementMoments) {
  const auto inc = simulate_subordinator(MixingLaw::gamma(2.0, 4.0), 0.5, 200000, 1);
  const auto mom = sample_moments(inc);
  // Gamma(shape dt, rate): mean 0.25, variance 0.0625.
  EXPECT_NEAR(mom.mean, 0.25, 5 * std::sqrt(0.0625 / 200000));
  EXPECT_NEAR(mom.var, 0.0625, 0.003);
}

TEST(Simulation, InverseGaussianIncrementMoments) {
  const auto inc = simulate_subordinator(MixingLaw::inverse_gaussian(1.0, 2.0), 0.5, 200000, 2);
  const auto mom = sample_moments(inc);
  // IG(a dt, b): mean a dt / b = 0.25, variance a dt / b^3 = 0.0625.
  EXPECT_NEAR(mom.mean, 0.25, 5 * std::sqrt(0.0625 / 200000));
  EXPECT_NEAR(mom.var, 0.0625, 0.004);
  for (double v : inc) EXPECT_GT(v, 0.0);
}

TEST(Simulation, DegenerateClockIsDeterministic) {
  for (double v : simulate_subordinator(MixingLaw::degenerate(2.0), 0.1, 10, 3)) EXPECT_DOUBLE_EQ(v, 0.2);
  EXPECT_THROW(simulate_subordinator(MixingLaw::gig(1.0, 1.0, 0.5), 0.1, 10, 3), std::invalid_argument);
}

TEST(Simulation, PathsDoNotDependOnPathCount) {
  const CarmaSpec spec({1.4, 0.5}, {0.2, 1.0});
  const auto one = simulate_tcbm_carma(spec, MixingLaw::gamma(1.0, 1.0), 1.0, 0.01, 1, 9, Eigen::VectorXd::Zero(2));
  const auto many = simulate_tcbm_carma(spec, MixingLaw::gamma(1.0, 1.0), 1.0, 0.01, 4, 9, Eigen::VectorXd::Zero(2), false);
  EXPECT_DOUBLE_EQ(one.terminal_values[0], many.terminal_values[0]);
  EXPECT_TRUE(many.paths.empty());
  ASSERT_EQ(one.times.size(), 101u);
  EXPECT_DOUBLE_EQ(one.times.back(), 1.0);
  EXPECT_DOUBLE_EQ(one.paths[0].back(), one.terminal_values[0]);
}

TEST(Simulation, ShortLastStepLandsOnHorizon) {
  const CarmaSpec spec({1.0}, {1.0});
  const auto set = simulate_tcbm_carma(spec, MixingLaw::degenerate(1.0), 0.25, 0.1, 1, 1, Eigen::VectorXd::Zero(1));
  ASSERT_EQ(set.times.size(), 4u);
  EXPECT_DOUBLE_EQ(set.times.back(), 0.25);
}

TEST(Simulation, EulerVarianceMatchesRecursion) {
  // X_{i+1} = (1 - a h) X_i + sqrt(h) Z: Var X_N = h sum_j (1 - a h)^{2j}.
  const double a = 1.0, h = 0.05;
  const int steps = 20;
  double oracle = 0.0;
  for (int j = 0; j < steps; ++j) oracle += h * std::pow(1.0 - a * h, 2 * j);
  const auto set = simulate_tcbm_carma(CarmaSpec({a}, {1.0}), MixingLaw::degenerate(1.0), steps * h, h, 100000, 4,
                                       Eigen::VectorXd::Zero(1), false);
  const auto mom = sample_moments(set.terminal_values);
  EXPECT_NEAR(mom.mean, 0.0, 5 * std::sqrt(oracle / 100000));
  EXPECT_NEAR(mom.var / oracle, 1.0, 0.02);
}

TEST(Simulation, ObservationsAreSubsampled) {
  const auto obs = simulate_observations(CarmaSpec({1.0}, {0.24}), MixingLaw::gamma(1.0, 1.0), 10.0, 0.01, 100, 5,
                                         Eigen::VectorXd::Zero(1));
  ASSERT_EQ(obs.size(), 11u);
  for (std::size_t i = 0; i < obs.size(); ++i) EXPECT_NEAR(obs[i].first, static_cast<double>(i), 1e-9);
  EXPECT_THROW(simulate_observations(CarmaSpec({1.0}, {0.24}), MixingLaw::gamma(1.0, 1.0), 10.0, 0.01, 0, 5,
                                     Eigen::VectorXd::Zero(1)),
               std::invalid_argument);
}

TEST(Simulation, NvmmSampleMoments) {
  const auto y = simulate_nvmm({0.1, -0.3, 0.8}, MixingLaw::gamma(2.0, 2.0), 200000, 6);
  const auto mom = sample_moments(y);
  // E = mu + theta E[L]; Var = sigma^2 E[L] + theta^2 Var[L] with E[L] = 1, Var[L] = 0.5.
  EXPECT_NEAR(mom.mean, -0.2, 0.01);
  EXPECT_NEAR(mom.var, 0.64 + 0.09 * 0.5, 0.01);
}

TEST(Simulation, McSummaryUsesNormalBounds) {
  const auto est = mc_summary({1.0, 2.0, 3.0, 4.0});
  const double se = std::sqrt(5.0 / 3.0) / 2.0;
  EXPECT_DOUBLE_EQ(est.mid, 2.5);
  EXPECT_NEAR(est.standard_error, se, 1e-15);
  EXPECT_NEAR(est.upper - est.mid, 1.6448536269514722 * se, 1e-14);
  EXPECT_NEAR(est.mid - est.lower, 1.6448536269514722 * se, 1e-14);
  EXPECT_EQ(est.n, 4);
  EXPECT_THROW(mc_summary({}), std::invalid_argument);
}

TEST(Simulation, McPriceDiscountsPayoff) {
  PathSet set;
  set.terminal_values = {0.0, std::log(2.0)};
  const auto est = mc_price([](double y) { return std::exp(y); }, set, 0.5);
  EXPECT_NEAR(est.mid, 0.75, 1e-15);
}
