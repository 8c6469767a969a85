#include "lagcarma/estimation.hpp"
#include "lagcarma/nelder_mead.hpp"
#include "lagcarma/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace lagcarma;

namespace {

TimeSeries simulated(const CarmaSpec& spec, const MixingLaw& law, double T, double spacing, std::uint64_t seed) {
  TimeSeries obs;
  for (auto [t, y] : simulate_observations(spec, law, T, 0.01, static_cast<int>(std::lround(spacing / 0.01)), seed,
                                           Eigen::VectorXd::Zero(spec.p()))) {
    obs.push_back({t, y});
  }
  return obs;
}

// Exact AR(1) log-likelihood of a CAR(1) sampled at unit spacing with noise rate 1.
double ar1_loglik(const TimeSeries& obs, double a, double b0) {
  const double phi = std::exp(-a);
  const double v = b0 * b0 / (2.0 * a);
  const auto normal = [](double y, double var) { return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * y * y / var; };
  double ll = normal(obs[0].y, v);
  for (std::size_t i = 1; i < obs.size(); ++i) ll += normal(obs[i].y - phi * obs[i - 1].y, v * (1.0 - phi * phi));
  return ll;
}

}  // namespace

TEST(NelderMead, MinimizesRosenbrock) {
  const auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = nelder_mead(f, {-1.2, 1.0}, NelderMeadOptions{5000, 1e-14, 1e-9, 0.1});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(NelderMead, TreatsNonFiniteValuesAsInfeasible) {
  const auto f = [](const std::vector<double>& x) { return x[0] < 0.0 ? std::nan("") : (x[0] - 2.0) * (x[0] - 2.0); };
  const auto r = nelder_mead(f, {0.5}, NelderMeadOptions{2000, 1e-12, 1e-8, 1.0});
  EXPECT_NEAR(r.x[0], 2.0, 1e-5);
}

TEST(Estimation, ParameterNamesAndRoundTrip) {
  const std::vector<std::string> expected = {"a1", "a2", "b0", "b1", "shape", "rate"};
  EXPECT_EQ(parameter_names(2, 1, LawFamily::gamma), expected);
  EXPECT_EQ(parameter_names(1, 0, LawFamily::inverse_gaussian).back(), "ig_b");
  const std::map<std::string, double> est = {{"a1", 1.4}, {"a2", 0.5}, {"b0", 0.2}, {"b1", 1.0}, {"shape", 2.0}, {"rate", 3.0}};
  const auto spec = spec_from_estimates(est, 2, 1);
  EXPECT_DOUBLE_EQ(spec.ar_coeffs()[1], 0.5);
  EXPECT_DOUBLE_EQ(spec.ma_coeffs()[0], 0.2);
  EXPECT_DOUBLE_EQ(std::get<GammaLaw>(law_from_estimates(est, LawFamily::gamma).params()).rate, 3.0);
  EXPECT_THROW(law_from_estimates(est, LawFamily::gig), std::invalid_argument);
}

TEST(Estimation, GaussianFitMatchesAr1ProfileLikelihood) {
  const CarmaSpec truth({0.6}, {0.8});
  const auto obs = simulated(truth, MixingLaw::degenerate(1.0), 400.0, 1.0, 11);
  // Profile likelihood: for fixed a the optimal b0^2 is closed form; golden section over a.
  const auto profile = [&](double a) {
    const double phi = std::exp(-a);
    double s = obs[0].y * obs[0].y * 2.0 * a;
    for (std::size_t i = 1; i < obs.size(); ++i) s += std::pow(obs[i].y - phi * obs[i - 1].y, 2) * 2.0 * a / (1.0 - phi * phi);
    const double b0 = std::sqrt(s / static_cast<double>(obs.size()));
    return std::pair{ar1_loglik(obs, a, b0), b0};
  };
  double lo = 0.05, hi = 5.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    if (profile(x1).first > profile(x2).first) hi = x2; else lo = x1;
  }
  const double a_hat = 0.5 * (lo + hi);
  const auto [ll_hat, b_hat] = profile(a_hat);
  FitConfig config;
  const auto fit = fit_gaussian_carma(obs, 1, 0, config);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.estimates.at("a1"), a_hat, 2e-3);
  EXPECT_NEAR(fit.estimates.at("b0"), b_hat, 2e-3);
  EXPECT_NEAR(fit.loglik, ll_hat, 1e-5);
}

TEST(Estimation, LikelihoodInvariantUnderScaleExchange) {
  // b -> s b with Lambda -> Lambda / s^2 leaves the observation law unchanged.
  const CarmaSpec spec({1.35, 0.05}, {0.2, 1.0});
  const auto obs = simulated(spec, MixingLaw::gamma(1.0, 1.0), 100.0, 0.5, 12);
  const double s = 1.7;
  const CarmaSpec scaled({1.35, 0.05}, {0.2 * s, 1.0 * s});
  for (auto filter : {FilterMethod::kalman, FilterMethod::brockwell}) {
    FitConfig config;
    config.filter = filter;
    const auto a = tcbm_loglik(spec, MixingLaw::gamma(1.0, 1.0), obs, config);
    const auto b = tcbm_loglik(scaled, MixingLaw::gamma(1.0, s * s), obs, config);
    EXPECT_NEAR(a.value, b.value, 1e-8) << to_string(filter);
  }
}

TEST(Estimation, IdentificationChoiceGivesSameMaximum) {
  const CarmaSpec truth({1.0}, {0.24});
  const auto obs = simulated(truth, MixingLaw::gamma(1.0, 1.0), 300.0, 1.0, 13);
  FitConfig config;
  config.n = 1;
  config.m = 3;
  const auto law_scale = fit_tcbm_carma(obs, 1, 0, LawFamily::gamma, config);
  config.identification = Identification::ma_leading;
  const auto ma_leading = fit_tcbm_carma(obs, 1, 0, LawFamily::gamma, config);
  EXPECT_NEAR(law_scale.loglik, ma_leading.loglik, 1e-3);
  EXPECT_DOUBLE_EQ(ma_leading.estimates.at("b0"), 1.0);
  EXPECT_DOUBLE_EQ(law_scale.estimates.at("rate"), 1.0);
}

TEST(Estimation, FitIsDeterministic) {
  const CarmaSpec truth({1.0}, {0.24});
  const auto obs = simulated(truth, MixingLaw::gamma(1.0, 1.0), 200.0, 1.0, 14);
  FitConfig config;
  config.n = 1;
  config.m = 2;
  config.restarts = 1;
  config.seed = 7;
  const auto a = fit_tcbm_carma(obs, 1, 0, LawFamily::gamma, config);
  const auto b = fit_tcbm_carma(obs, 1, 0, LawFamily::gamma, config);
  EXPECT_EQ(a.estimates, b.estimates);
  EXPECT_EQ(a.loglik, b.loglik);
}

TEST(Estimation, StandardErrorsArePositive) {
  const CarmaSpec truth({1.0}, {0.24});
  const auto obs = simulated(truth, MixingLaw::gamma(1.0, 1.0), 300.0, 1.0, 15);
  FitConfig config;
  config.n = 1;
  config.m = 2;
  config.standard_errors = true;
  const auto fit = fit_tcbm_carma(obs, 1, 0, LawFamily::gamma, config);
  ASSERT_TRUE(fit.standard_errors.has_value());
  for (const auto& name : {"a1", "b0", "shape"}) {
    EXPECT_GT(fit.standard_errors->at(name), 0.0) << name;
    EXPECT_TRUE(std::isfinite(fit.standard_errors->at(name))) << name;
  }
}

TEST(Estimation, RejectsInvalidRequests) {
  const CarmaSpec truth({1.0}, {0.24});
  const auto obs = simulated(truth, MixingLaw::gamma(1.0, 1.0), 30.0, 1.0, 16);
  FitConfig config;
  EXPECT_THROW(fit_tcbm_carma(obs, 1, 0, LawFamily::gamma, config), std::invalid_argument);
  const auto longer = simulated(truth, MixingLaw::gamma(1.0, 1.0), 100.0, 1.0, 16);
  EXPECT_THROW(fit_tcbm_carma(longer, 1, 1, LawFamily::gamma, config), std::invalid_argument);
  EXPECT_THROW(fit_tcbm_carma(longer, 1, 0, LawFamily::gig, config), std::invalid_argument);
}
