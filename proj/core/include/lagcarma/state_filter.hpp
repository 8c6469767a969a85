#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/timeseries.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace lagcarma {

enum class FilterMethod { brockwell, kalman };

std::string to_string(FilterMethod method);
FilterMethod parse_filter_method(const std::string& name);

struct FilteredStates {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  FilterMethod method;
  /// Leading states that should not enter likelihoods.
  int warmup = 0;
};

/// Evolves the first q state components through dX = B X dt + e_q Y dt / b_q
/// (Y held at the previous observation over each step, exact exponential
/// update); component q+1 follows from Y = b'X and the rest from finite
/// differences. For q = 0, X_1 = Y / b_0.
FilteredStates brockwell_filter(const CarmaSpec& spec, std::span<const Observation> observations);

/// Linear Kalman filter with exact observations (innovation jitter 1e-12)
/// started from the stationary law.
FilteredStates kalman_filter(const CarmaSpec& spec, double noise_variance_rate,
                             std::span<const Observation> observations);

/// Prediction-error log-likelihood of the Kalman filter.
double gaussian_loglik(const CarmaSpec& spec, double noise_variance_rate,
                       std::span<const Observation> observations);

/// Solves A P + P A' + e e' = 0.
Eigen::MatrixXd stationary_covariance(const CarmaSpec& spec);

/// int_0^dt e^{As} e e' e^{A's} ds via the augmented exponential.
Eigen::MatrixXd process_noise_covariance(const CarmaSpec& spec, double dt);

/// One prediction/update pass; exposed for diagnostics and tests.
struct KalmanStep {
  Eigen::VectorXd predicted_state;
  Eigen::MatrixXd predicted_covariance;
  Eigen::VectorXd filtered_state;
  Eigen::MatrixXd filtered_covariance;
  double innovation;
  double innovation_variance;
};

std::vector<KalmanStep> kalman_pass(const CarmaSpec& spec, double noise_variance_rate,
                                    std::span<const Observation> observations);

}  // namespace lagcarma
