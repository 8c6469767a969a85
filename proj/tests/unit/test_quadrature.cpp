#include "lagcarma/errors.hpp"
#include "lagcarma/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace lagcarma;

namespace {

double weighted_moment(const QuadratureRule& rule, int j) {
  double s = 0.0;
  for (int i = 0; i < rule.order(); ++i) s += rule.weights()[i] * std::pow(rule.nodes()[i], j);
  return s;
}

}  // namespace

TEST(Quadrature, TwoPointRuleMatchesHandDerivedValues) {
  // L_2(x) = (x^2 - 4x + 2) / 2: nodes 2 -+ sqrt(2), weights (2 +- sqrt(2)) / 4.
  const auto rule = build_rule(2);
  const double r = std::sqrt(2.0);
  EXPECT_NEAR(rule.nodes()[0], 2.0 - r, 1e-15);
  EXPECT_NEAR(rule.nodes()[1], 2.0 + r, 1e-14);
  EXPECT_NEAR(rule.weights()[0], (2.0 + r) / 4.0, 1e-15);
  EXPECT_NEAR(rule.weights()[1], (2.0 - r) / 4.0, 1e-15);
}

TEST(Quadrature, OnePointGeneralizedRule) {
  // m = 1: node alpha + 1, weight Gamma(alpha + 1).
  const auto rule = build_rule(1, 0.5);
  EXPECT_NEAR(rule.nodes()[0], 1.5, 1e-15);
  EXPECT_NEAR(rule.weights()[0], std::tgamma(1.5), 1e-15);
}

TEST(Quadrature, ExactForMonomialsUpToDegreeTwoMMinusOne) {
  for (int m = 2; m <= 20; ++m) {
    const auto rule = build_rule(m);
    for (int j = 0; j <= 2 * m - 1; ++j) {
      EXPECT_NEAR(weighted_moment(rule, j) / std::tgamma(j + 1.0), 1.0, 1e-9) << "m=" << m << " j=" << j;
    }
  }
}

TEST(Quadrature, GeneralizedRuleExactness) {
  for (double alpha : {-0.7, -0.25, 0.5, 2.0}) {
    const auto rule = build_rule(8, alpha);
    for (int j = 0; j <= 15; ++j) {
      EXPECT_NEAR(weighted_moment(rule, j) / std::tgamma(j + alpha + 1.0), 1.0, 1e-10)
          << "alpha=" << alpha << " j=" << j;
    }
  }
}

TEST(Quadrature, NodesAreLaguerreRoots) {
  // Sign change of L_m across each node, with L_m from the three-term recurrence.
  const int m = 12;
  const auto laguerre = [m](double x) {
    double p0 = 1.0, p1 = 1.0 - x;
    for (int k = 1; k < m; ++k) {
      const double p2 = ((2.0 * k + 1.0 - x) * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    return p1;
  };
  const auto rule = build_rule(m);
  for (double x : rule.nodes()) {
    const double d = 1e-10 * x;
    EXPECT_LT(laguerre(x - d) * laguerre(x + d), 0.0) << "x=" << x;
  }
}

TEST(Quadrature, NodesIncreasingAndWeightsPositive) {
  for (int m : {1, 5, 40, 100, 180}) {
    const auto rule = build_rule(m);
    ASSERT_EQ(rule.order(), m);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      EXPECT_GT(rule.nodes()[i], 0.0);
      if (i > 0) EXPECT_GT(rule.nodes()[i], rule.nodes()[i - 1]);
      EXPECT_GT(rule.weights()[i], 0.0);
      EXPECT_NEAR(rule.log_weights()[i], std::log(rule.weights()[i]), 1e-9 * std::abs(rule.log_weights()[i]) + 1e-12);
      total += rule.weights()[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-13) << "m=" << m;
  }
}

TEST(Quadrature, HighOrderMomentsStayAccurate) {
  const auto rule = build_rule(180);
  for (int j = 0; j <= 20; ++j) EXPECT_NEAR(weighted_moment(rule, j) / std::tgamma(j + 1.0), 1.0, 1e-12);
}

TEST(Quadrature, RejectsInvalidArguments) {
  EXPECT_THROW(build_rule(0), std::invalid_argument);
  EXPECT_THROW(build_rule(kMaxQuadratureOrder + 1), std::invalid_argument);
  EXPECT_THROW(build_rule(4, -1.0), std::invalid_argument);
  EXPECT_THROW(build_rule(4, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST(Quadrature, IntegrateReportsNonFiniteNode) {
  const auto rule = build_rule(6);
  EXPECT_NEAR(integrate(rule, [](double x) { return x * x; }), 2.0, 1e-13);
  try {
    integrate(rule, [&](double x) { return x > rule.nodes()[3] ? std::nan("") : 1.0; });
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_DOUBLE_EQ(e.node(), rule.nodes()[4]);
  }
}

TEST(Quadrature, ConvergenceProfileShrinksForSmoothIntegrand) {
  // int_0^inf e^{-x} / (1 + x) dx = e E_1(1).
  const double reference = 0.59634736232319407434;
  const int orders[] = {4, 8, 16, 32};
  const auto profile = convergence_profile([](double x) { return 1.0 / (1.0 + x); }, orders, reference);
  ASSERT_EQ(profile.size(), 4u);
  for (std::size_t i = 1; i < profile.size(); ++i) EXPECT_LT(profile[i].abs_error, profile[i - 1].abs_error);
  EXPECT_LT(profile.back().abs_error, 1e-4);
}
