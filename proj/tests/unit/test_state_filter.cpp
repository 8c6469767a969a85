#include "lagcarma/simulation.hpp"
#include "lagcarma/state_filter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace lagcarma;

namespace {

std::vector<Observation> simulated(const CarmaSpec& spec, double T, double spacing, std::uint64_t seed) {
  std::vector<Observation> obs;
  for (auto [t, y] : simulate_observations(spec, MixingLaw::gamma(1.0, 1.0), T, 0.01,
                                           static_cast<int>(std::lround(spacing / 0.01)), seed,
                                           Eigen::VectorXd::Zero(spec.p()))) {
    obs.push_back({t, y});
  }
  return obs;
}

}  // namespace

TEST(StateFilter, StationaryCovarianceSolvesLyapunov) {
  const CarmaSpec car1({0.8}, {1.0});
  EXPECT_NEAR(stationary_covariance(car1)(0, 0), 1.0 / 1.6, 1e-14);
  // CAR(2): diag(1 / (2 a1 a2), 1 / (2 a1)).
  const CarmaSpec car2({1.4, 0.5}, {1.0});
  const auto p = stationary_covariance(car2);
  EXPECT_NEAR(p(0, 0), 1.0 / (2.0 * 1.4 * 0.5), 1e-13);
  EXPECT_NEAR(p(1, 1), 1.0 / 2.8, 1e-13);
  EXPECT_NEAR(p(0, 1), 0.0, 1e-13);
  const CarmaSpec car3({2.0, 1.5, 0.3}, {0.5, 1.0});
  const auto p3 = stationary_covariance(car3);
  const Eigen::MatrixXd e = car3.e_vec();
  EXPECT_LT((car3.companion() * p3 + p3 * car3.companion().transpose() + e * e.transpose()).norm(), 1e-12);
}

TEST(StateFilter, ProcessNoiseMatchesQuadrature) {
  const CarmaSpec car1({0.8}, {1.0});
  EXPECT_NEAR(process_noise_covariance(car1, 0.5)(0, 0), (1.0 - std::exp(-0.8)) / 1.6, 1e-14);
  const CarmaSpec spec({1.4, 0.5}, {0.2, 1.0});
  // Composite Simpson on e^{As} e e' e^{A's}.
  const int n = 2000;
  const double dt = 0.7;
  Eigen::MatrixXd simpson = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i <= n; ++i) {
    const Eigen::VectorXd v = matrix_exponential(spec.companion(), dt * i / n) * spec.e_vec();
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * v * v.transpose();
  }
  simpson *= dt / (3.0 * n);
  EXPECT_LT((process_noise_covariance(spec, dt) - simpson).norm(), 1e-12);
}

TEST(StateFilter, KalmanLikelihoodOfCar1IsTheAr1Likelihood) {
  const double a = 0.7, b0 = 0.5, rate = 1.3;
  const CarmaSpec spec({a}, {b0});
  const auto obs = simulated(spec, 60.0, 1.0, 3);
  const double phi = std::exp(-a);
  const double stationary = b0 * b0 * rate / (2.0 * a);
  const auto normal = [](double y, double v) { return -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * y * y / v; };
  double oracle = normal(obs[0].y, stationary);
  for (std::size_t i = 1; i < obs.size(); ++i) {
    oracle += normal(obs[i].y - phi * obs[i - 1].y, stationary * (1.0 - phi * phi));
  }
  EXPECT_NEAR(gaussian_loglik(spec, rate, obs), oracle, 1e-6);
}

TEST(StateFilter, KalmanRecoversObservedCar1State) {
  const CarmaSpec spec({0.7}, {0.5});
  const auto obs = simulated(spec, 20.0, 1.0, 4);
  const auto filtered = kalman_filter(spec, 1.0, obs);
  ASSERT_EQ(filtered.states.size(), obs.size());
  EXPECT_EQ(filtered.method, FilterMethod::kalman);
  for (std::size_t i = 0; i < obs.size(); ++i) EXPECT_NEAR(filtered.states[i](0), obs[i].y / 0.5, 1e-6);
}

TEST(StateFilter, KalmanPassKeepsCovariancesSymmetric) {
  const CarmaSpec spec({1.4, 0.5}, {0.2, 1.0});
  const auto steps = kalman_pass(spec, 1.0, simulated(spec, 10.0, 0.5, 5));
  for (const auto& s : steps) {
    EXPECT_LT((s.predicted_covariance - s.predicted_covariance.transpose()).norm(), 1e-14);
    EXPECT_GT(s.innovation_variance, 0.0);
    EXPECT_GE(s.filtered_covariance.trace(), -1e-12);
  }
  EXPECT_THROW(kalman_filter(spec, 0.0, simulated(spec, 2.0, 0.5, 5)), std::invalid_argument);
}

TEST(StateFilter, BrockwellStatesReproduceObservations) {
  const CarmaSpec spec({1.35, 0.05}, {0.2, 1.0});
  const auto obs = simulated(spec, 50.0, 0.5, 6);
  const auto filtered = brockwell_filter(spec, obs);
  EXPECT_EQ(filtered.method, FilterMethod::brockwell);
  EXPECT_EQ(filtered.warmup, 1);
  for (std::size_t i = 0; i < obs.size(); ++i) EXPECT_NEAR(spec.b_vec().dot(filtered.states[i]), obs[i].y, 1e-10);
}

TEST(StateFilter, BrockwellFixedPointForConstantSeries) {
  const CarmaSpec spec({1.35, 0.05}, {0.2, 1.0});
  std::vector<Observation> obs;
  for (int i = 0; i < 20; ++i) obs.push_back({0.5 * i, 0.3});
  const auto filtered = brockwell_filter(spec, obs);
  for (const auto& x : filtered.states) {
    EXPECT_NEAR(x(0), 0.3 / 0.2, 1e-12);
    EXPECT_NEAR(x(1), 0.0, 1e-12);
  }
}

TEST(StateFilter, BrockwellOrderZeroMovingAverage) {
  const CarmaSpec spec({2.0, 1.0}, {0.5});
  std::vector<Observation> obs;
  for (int i = 0; i < 30; ++i) obs.push_back({0.1 * i, std::sin(0.1 * i)});
  const auto filtered = brockwell_filter(spec, obs);
  EXPECT_EQ(filtered.warmup, 1);
  for (std::size_t i = 0; i < obs.size(); ++i) EXPECT_NEAR(filtered.states[i](0), obs[i].y / 0.5, 1e-14);
  // Central difference of sin / 0.5 in the interior.
  EXPECT_NEAR(filtered.states[10](1), (std::sin(1.1) - std::sin(0.9)) / 0.2 / 0.5, 1e-12);
}

TEST(StateFilter, BrockwellRequiresInvertibility) {
  const CarmaSpec spec({1.35, 0.05}, {-0.2, 1.0});
  const std::vector<Observation> obs = {{0.0, 0.0}, {1.0, 1.0}};
  EXPECT_THROW(brockwell_filter(spec, obs), std::domain_error);
}

TEST(StateFilter, MethodNamesRoundTrip) {
  EXPECT_EQ(parse_filter_method(to_string(FilterMethod::brockwell)), FilterMethod::brockwell);
  EXPECT_EQ(parse_filter_method(to_string(FilterMethod::kalman)), FilterMethod::kalman);
  EXPECT_THROW(parse_filter_method("particle"), std::invalid_argument);
}
