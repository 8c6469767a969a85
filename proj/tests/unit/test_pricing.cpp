#include "lagcarma/errors.hpp"
#include "lagcarma/pricing.hpp"
#include "lagcarma/repro.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace lagcarma;

namespace {

double bs_call(double s, double k, double r, double vol, double T) {
  const double d1 = (std::log(s / k) + (r + 0.5 * vol * vol) * T) / (vol * std::sqrt(T));
  const double d2 = d1 - vol * std::sqrt(T);
  return s * normal_cdf(d1) - k * std::exp(-r * T) * normal_cdf(d2);
}

}  // namespace

TEST(Black, MatchesBlackScholes) {
  const double s = 100.0, k = 95.0, r = 0.03, vol = 0.25, T = 0.75;
  const double forward = s * std::exp(r * T);
  const double discount = std::exp(-r * T);
  EXPECT_NEAR(black_price(OptionKind::call, forward, k, vol * vol * T, discount), bs_call(s, k, r, vol, T), 1e-10);
  const double put = black_price(OptionKind::put, forward, k, vol * vol * T, discount);
  EXPECT_NEAR(bs_call(s, k, r, vol, T) - put, s - k * discount, 1e-10);
  EXPECT_DOUBLE_EQ(black_price(OptionKind::call, 1.2, 1.0, 0.0, 0.9), 0.9 * 0.2);
  EXPECT_DOUBLE_EQ(black_price(OptionKind::put, 1.2, 1.0, 0.0, 0.9), 0.0);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
}

TEST(NvmmPricing, DegenerateClockIsBlackScholes) {
  const NvmmPricingSetup setup{MixingLaw::degenerate(1.0), 0.0, 0.3, 1.0, 0.02};
  EXPECT_NEAR(nvmm_european_price(setup, OptionKind::call, 1.05, 2.0, 4), bs_call(1.0, 1.05, 0.02, 0.3, 2.0), 1e-12);
}

TEST(NvmmPricing, DeepInTheMoneyCallIsTheDiscountedForward) {
  const NvmmPricingSetup setup{MixingLaw::gamma(1.0, 1.0), -0.5, 1.0, 1.0, 0.0};
  // The martingale drift uses the analytic cumulant, so the tolerance reflects the quadrature error.
  EXPECT_NEAR(nvmm_european_price(setup, OptionKind::call, 1e-8, 1.0, 80), 1.0, 1e-3);
  const auto mix = discretize(setup.unit_law.at_horizon(1.0), 40);
  const double call = nvmm_european_price(setup, OptionKind::call, 0.9, 1.0, mix);
  const double put = nvmm_european_price(setup, OptionKind::put, 0.9, 1.0, mix);
  EXPECT_NEAR(call - put, std::exp(nvmm_martingale_drift(setup, 1.0) - nvmm_martingale_drift(setup, 1.0, &mix)) - 0.9,
              1e-12);
}

TEST(NvmmPricing, ConvergesInOrder) {
  const NvmmPricingSetup setup{MixingLaw::gamma(1.0, 1.0), -0.5, 1.0, 1.0, 0.0};
  const double reference = nvmm_european_price(setup, OptionKind::call, 1.0, 1.0, 150);
  EXPECT_NEAR(reference, 0.333355703290, 1e-9);
  double previous = 1.0;
  for (int m : {5, 20, 80}) {
    const double err = std::abs(nvmm_european_price(setup, OptionKind::call, 1.0, 1.0, m) - reference);
    EXPECT_LT(err, previous) << "m=" << m;
    previous = err;
  }
}

TEST(NvmmPricing, RejectsDriftOutsideMgfDomain) {
  const NvmmPricingSetup setup{MixingLaw::gamma(1.0, 1.0), 0.8, 1.0, 1.0, 0.0};
  EXPECT_THROW(nvmm_european_price(setup, OptionKind::call, 1.0, 1.0, 10), DomainError);
  EXPECT_THROW(nvmm_european_price(setup, OptionKind::call, -1.0, 1.0, 10), std::invalid_argument);
}

TEST(NvmmPricing, MonteCarloBracketsQuadrature) {
  const NvmmPricingSetup setup{MixingLaw::gamma(1.0, 1.0), -0.5, 1.0, 1.0, 0.0};
  const auto mc = mc_nvmm_price(setup, OptionKind::call, 1.0, 1.0, 20000, 1);
  EXPECT_LT(mc.lower, 0.333355703290);
  EXPECT_GT(mc.upper, 0.333355703290);
}

TEST(Futures, ClosedFormAtValuationTimeIsTheState) {
  PricingSetup setup(CarmaSpec({1.4, 0.5}, {0.2, 1.0}), MixingLaw::gamma(1.0, 1.0), Eigen::Vector2d(0.3, -0.1));
  setup.spot = 2.0;
  EXPECT_NEAR(futures_log_price_closed(setup, 0.0), std::log(2.0) + 0.2 * 0.3 - 0.1, 1e-15);
  EXPECT_NEAR(futures_log_price_laguerre(setup, 0.0), std::log(2.0) + 0.2 * 0.3 - 0.1, 1e-15);
  EXPECT_THROW(futures_log_price_closed(setup, -1.0), std::invalid_argument);
}

TEST(Futures, DegenerateClockIsGaussian) {
  // CAR(1): Var Y_T = v b0^2 (1 - e^{-2aT}) / (2a).
  const double a = 0.8, b0 = 0.6, v = 1.5, T = 0.7;
  PricingSetup setup(CarmaSpec({a}, {b0}), MixingLaw::degenerate(v), Eigen::VectorXd::Constant(1, 0.2));
  const double expected = b0 * 0.2 * std::exp(-a * T) + 0.5 * v * b0 * b0 * (1.0 - std::exp(-2.0 * a * T)) / (2.0 * a);
  EXPECT_NEAR(futures_log_price_closed(setup, T), expected, 1e-10);
}

TEST(Futures, LaguerreApproachesClosedForm) {
  auto setup = futures_reference_setup();
  setup.m = 4;
  const double closed = futures_log_price_closed(setup, 0.25);
  double previous = 1.0;
  for (int n : {4, 6, 8}) {
    setup.n = n;
    const double err = std::abs(futures_log_price_laguerre(setup, 0.25) - closed);
    EXPECT_LT(err, previous) << "n=" << n;
    previous = err;
  }
  EXPECT_LT(previous, 5e-3);
}

TEST(Futures, ClosedFormRejectsKernelOutsideCumulantDomain) {
  PricingSetup setup(CarmaSpec({0.5}, {3.0}), MixingLaw::gamma(1.0, 1.0));
  EXPECT_THROW(futures_log_price_closed(setup, 1.0), DomainError);
}

TEST(FuturesOption, StripMatchesFourierReference) {
  const auto setup = futures_reference_setup();
  const std::vector<double> strikes = {0.5, 0.8, 1.0, 1.1, 1.2, 1.35, 1.5};
  const std::vector<double> fourier = {0.594858, 0.303137, 0.119651, 0.068329, 0.057340, 0.047241, 0.040502};
  const auto strip = futures_option_strip(setup, 1.0 / 12, 2.0 / 12, strikes);
  for (std::size_t i = 0; i < strikes.size(); ++i) EXPECT_NEAR(strip[i].call, fourier[i], 5e-3) << strikes[i];
  for (std::size_t i = 1; i < strip.size(); ++i) {
    EXPECT_LT(strip[i].call, strip[i - 1].call);
    EXPECT_GT(strip[i].put, strip[i - 1].put);
  }
  for (std::size_t i = 1; i + 1 < strip.size(); ++i) {
    const double w = (strikes[i + 1] - strikes[i]) / (strikes[i + 1] - strikes[i - 1]);
    EXPECT_LE(strip[i].call, w * strip[i - 1].call + (1.0 - w) * strip[i + 1].call + 1e-12);
  }
}

TEST(FuturesOption, ParityAndDirectCallAgree) {
  const auto setup = futures_reference_setup();
  for (auto route : {FuturesOptionRoute::conditional_forward, FuturesOptionRoute::fixed_forward}) {
    const double parity = futures_option_price(setup, 1.0 / 12, 2.0 / 12, 1.1, OptionKind::call, route);
    const double direct = futures_option_price(setup, 1.0 / 12, 2.0 / 12, 1.1, OptionKind::call, route, true);
    if (route == FuturesOptionRoute::conditional_forward) {
      EXPECT_NEAR(parity, direct, 1e-12);
    } else {
      EXPECT_GT(std::abs(parity - direct), 0.0);
    }
  }
}

TEST(FuturesOption, TinyStrikeCallIsTheFuturesPrice) {
  auto setup = futures_reference_setup();
  setup.rate = 0.05;
  const auto q = futures_option_strip(setup, 1.0 / 12, 2.0 / 12, std::vector<double>{1e-9});
  EXPECT_NEAR(q[0].call, std::exp(-0.05 / 12) * q[0].futures, 1e-8);
  EXPECT_THROW(futures_option_price(setup, 2.0 / 12, 1.0 / 12, 1.0, OptionKind::put), std::invalid_argument);
}

TEST(TermStructure, MonteCarloColumnsOnlyWhenRequested) {
  const auto setup = futures_reference_setup();
  const double maturities[] = {1.0 / 12};
  const auto plain = term_structure(setup, maturities);
  EXPECT_FALSE(plain[0].mc_mid.has_value());
  const auto mc = term_structure(setup, maturities, 2000, 1, 50);
  ASSERT_TRUE(mc[0].mc_mid.has_value());
  EXPECT_LE(*mc[0].mc_lower, *mc[0].mc_mid);
  EXPECT_GE(*mc[0].mc_upper, *mc[0].mc_mid);
  EXPECT_NEAR(plain[0].laguerre, plain[0].closed, 5e-3);
}
