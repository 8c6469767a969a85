#include "lagcarma/carma.hpp"
#include "lagcarma/errors.hpp"
#include "lagcarma/mixing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace lagcarma;

namespace {

Eigen::MatrixXd taylor_exponential(const Eigen::MatrixXd& a, double t) {
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * a * (t / k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST(CarmaSpec, CompanionLayout) {
  const CarmaSpec spec({1.4, 0.5}, {0.2, 1.0});
  const auto& a = spec.companion();
  EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(a(1, 0), -0.5);
  EXPECT_DOUBLE_EQ(a(1, 1), -1.4);
  EXPECT_DOUBLE_EQ(spec.e_vec()(1), 1.0);
  EXPECT_DOUBLE_EQ(spec.b_vec()(0), 0.2);
  EXPECT_EQ(spec.p(), 2);
  EXPECT_EQ(spec.q(), 1);
  const CarmaSpec padded({1.0, 2.0, 0.5}, {1.0});
  EXPECT_EQ(padded.b_vec().size(), 3);
  EXPECT_DOUBLE_EQ(padded.b_vec()(2), 0.0);
}

TEST(CarmaSpec, StationarityAndInvertibility) {
  EXPECT_TRUE(CarmaSpec({1.4, 0.5}, {0.2, 1.0}).is_stationary());
  EXPECT_FALSE(CarmaSpec({-1.0}, {1.0}).is_stationary());
  EXPECT_TRUE(CarmaSpec({1.4, 0.5}, {0.2, 1.0}).is_invertible());
  EXPECT_FALSE(CarmaSpec({1.4, 0.5}, {-0.2, 1.0}).is_invertible());
  EXPECT_NEAR(CarmaSpec({3.0, 2.0}, {1.0}).spectral_abscissa(), -1.0, 1e-12);
  EXPECT_THROW(CarmaSpec({-1.0}, {1.0}).require_stationary("test"), std::domain_error);
}

TEST(CarmaSpec, RejectsInvalidOrders) {
  EXPECT_THROW(CarmaSpec({}, {1.0}), std::invalid_argument);
  EXPECT_THROW(CarmaSpec({1.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(CarmaSpec({1.0, 1.0}, {1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(CarmaSpec(std::vector<double>(11, 1.0), {1.0}), std::invalid_argument);
}

TEST(Carma, PolynomialRoots) {
  // (z + 1)(z + 2) = 2 + 3z + z^2.
  const double c[] = {2.0, 3.0, 1.0};
  auto roots = polynomial_roots(c);
  ASSERT_EQ(roots.size(), 2u);
  std::sort(roots.begin(), roots.end(), [](auto x, auto y) { return x.real() < y.real(); });
  EXPECT_NEAR(roots[0].real(), -2.0, 1e-12);
  EXPECT_NEAR(roots[1].real(), -1.0, 1e-12);
}

TEST(Carma, MatrixExponentialMatchesTaylorSeries) {
  const CarmaSpec spec({1.4, 0.5, 0.3}, {0.2, 1.0});
  for (double t : {0.0, 0.01, 0.7, 3.0}) {
    EXPECT_LT((matrix_exponential(spec.companion(), t) - taylor_exponential(spec.companion(), t)).norm(), 1e-12)
        << "t=" << t;
  }
}

TEST(Carma, OrderOneKernelIsExponential) {
  const CarmaSpec spec({0.25}, {1.5});
  for (double s : {0.0, 0.3, 2.0}) {
    EXPECT_NEAR(kernel(spec, s), 1.5 * std::exp(-0.25 * s), 1e-14);
    EXPECT_NEAR(kernel_spectral(spec, s), 1.5 * std::exp(-0.25 * s), 1e-14);
  }
}

TEST(Carma, SpectralAndMatrixKernelsAgree) {
  const CarmaSpec spec({1.35, 0.05}, {0.2, 1.0});
  ASSERT_TRUE(spec.has_distinct_eigenvalues());
  const auto decomp = spectral_decomposition(spec);
  EXPECT_EQ(decomp.eigenvalues.size(), 2u);
  for (double s : {0.0, 0.1, 1.0, 10.0}) EXPECT_NEAR(kernel_matrix_form(spec, s), kernel_spectral(spec, s), 1e-12);
  const double offsets[] = {0.5, 1.5};
  const auto values = kernel_values(spec, offsets);
  EXPECT_NEAR(values[1], kernel(spec, 1.5), 1e-15);
}

TEST(Carma, RepeatedEigenvaluesNeedMatrixForm) {
  // (z + 1)^2.
  const CarmaSpec spec({2.0, 1.0}, {1.0});
  EXPECT_FALSE(spec.has_distinct_eigenvalues());
  EXPECT_THROW(kernel_spectral(spec, 1.0), std::domain_error);
  // g(s) = s e^{-s} for b = e_1.
  EXPECT_NEAR(kernel(spec, 2.0), 2.0 * std::exp(-2.0), 1e-14);
}

TEST(Carma, ConditionalMomentsUsePropagatedState) {
  const CarmaSpec spec({1.4, 0.5}, {0.2, 1.0});
  Eigen::VectorXd x0(2);
  x0 << 0.3, -0.1;
  const auto cm = conditional_moments(spec, x0, 0.5);
  const double expected = spec.b_vec().dot(matrix_exponential(spec.companion(), 0.5) * x0);
  EXPECT_NEAR(cm.mean, expected, 1e-14);
  EXPECT_NEAR(cm.variance_kernel(0.2), std::pow(kernel(spec, 0.2), 2), 1e-15);
  EXPECT_THROW(conditional_moments(spec, Eigen::VectorXd::Zero(3), 0.5), std::invalid_argument);
}

TEST(Carma, ScaleNormalizeScalesKernel) {
  const CarmaSpec spec({1.4, 0.5}, {0.2, 1.0});
  const auto scaled = scale_normalize(spec, 2.0);
  EXPECT_NEAR(kernel(scaled, 0.7), 2.0 * kernel(spec, 0.7), 1e-14);
  EXPECT_THROW(scale_normalize(spec, 0.0), std::invalid_argument);
}

TEST(Carma, CumulantOfIntegral) {
  // Deterministic clock: int_0^1 c e^{-s} ds = c (1 - e^{-1}).
  const auto identity = [](double c) { return c; };
  EXPECT_NEAR(cumulant_of_integral(identity, [](double s) { return 0.5 * std::exp(-s); }, 1.0),
              0.5 * (1.0 - std::exp(-1.0)), 1e-12);
  EXPECT_DOUBLE_EQ(cumulant_of_integral(identity, [](double) { return 1.0; }, 0.0), 0.0);
  const auto gamma = MixingLaw::gamma(1.0, 1.0);
  const auto k = [&](double c) { return gamma.cumulant(c); };
  // Gamma: int_0^T -log(1 - c) du = -T log(1 - c) for constant c.
  EXPECT_NEAR(cumulant_of_integral(k, [](double) { return 0.5; }, 2.0), -2.0 * std::log(0.5), 1e-12);
  EXPECT_THROW(cumulant_of_integral(k, [](double s) { return 2.0 - s; }, 1.5), DomainError);
}
