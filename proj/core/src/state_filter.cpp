#include "lagcarma/state_filter.hpp"

#include "lagcarma/mixing.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace lagcarma {

namespace {

constexpr double kInnovationJitter = 1e-12;

// Central differences in the interior, one-sided at the ends.
std::vector<double> differentiate(std::span<const double> t, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (x[1] - x[0]) / (t[1] - t[0]);
  d[n - 1] = (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (t[i + 1] - t[i - 1]);
  return d;
}

}  // namespace

std::string to_string(FilterMethod method) {
  return method == FilterMethod::brockwell ? "brockwell" : "kalman";
}

FilterMethod parse_filter_method(const std::string& name) {
  if (name == "brockwell") return FilterMethod::brockwell;
  if (name == "kalman") return FilterMethod::kalman;
  throw std::invalid_argument("unknown filter method '" + name + "'");
}

FilteredStates brockwell_filter(const CarmaSpec& spec, std::span<const Observation> obs) {
  require_increasing_times(obs, "brockwell_filter");
  if (obs.empty()) throw std::invalid_argument("brockwell_filter: no observations");
  if (!spec.is_invertible()) {
    throw std::domain_error("brockwell_filter: moving-average polynomial has roots outside the open left half-plane");
  }
  const int p = spec.p();
  const int q = spec.q();
  const auto b = spec.ma_coeffs();
  const std::size_t n = obs.size();

  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = obs[i].t;

  // columns[j][i] = component j+1 at time i
  std::vector<std::vector<double>> columns(static_cast<std::size_t>(p), std::vector<double>(n, 0.0));
  if (q == 0) {
    for (std::size_t i = 0; i < n; ++i) columns[0][i] = obs[i].y / b[0];
  } else {
    // Augmented generator [[B, e_q / b_q], [0, 0]] so that one exponential
    // gives the zero-order-hold update for the held observation.
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(q + 1, q + 1);
    for (int j = 0; j + 1 < q; ++j) gen(j, j + 1) = 1.0;
    for (int j = 0; j < q; ++j) gen(q - 1, j) = -b[static_cast<std::size_t>(j)] / b[static_cast<std::size_t>(q)];
    gen(q - 1, q) = 1.0 / b[static_cast<std::size_t>(q)];

    std::map<long long, Eigen::MatrixXd> steps;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(q + 1);
    z(0) = obs[0].y / b[0];  // fixed point for a constant observation
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        const double dt = obs[i].t - obs[i - 1].t;
        const long long key = std::llround(dt * 1e12);
        auto it = steps.find(key);
        if (it == steps.end()) it = steps.emplace(key, matrix_exponential(gen, dt)).first;
        z(q) = obs[i - 1].y;
        z = it->second * z;
      }
      double rest = obs[i].y;
      for (int j = 0; j < q; ++j) {
        columns[static_cast<std::size_t>(j)][i] = z(j);
        rest -= b[static_cast<std::size_t>(j)] * z(j);
      }
      if (q < p) columns[static_cast<std::size_t>(q)][i] = rest / b[static_cast<std::size_t>(q)];
    }
  }
  const int first_derived = q == 0 ? 1 : q + 1;
  for (int j = first_derived; j < p; ++j) {
    columns[static_cast<std::size_t>(j)] = differentiate(times, columns[static_cast<std::size_t>(j - 1)]);
  }

  FilteredStates out;
  out.times = std::move(times);
  out.method = FilterMethod::brockwell;
  out.warmup = q == 0 ? p - 1 : p - q;
  out.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(p);
    for (int j = 0; j < p; ++j) x(j) = columns[static_cast<std::size_t>(j)][i];
    out.states[i] = std::move(x);
  }
  return out;
}

Eigen::MatrixXd stationary_covariance(const CarmaSpec& spec) {
  spec.require_stationary("stationary_covariance");
  const int p = spec.p();
  const Eigen::MatrixXd& a = spec.companion();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
  // vec(A P + P A') = (I kron A + A kron I) vec(P)
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(p * p, p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      k.block(i * p, j * p, p, p) += id(i, j) * a;
      k.block(i * p, j * p, p, p) += a(i, j) * id;
    }
  const Eigen::MatrixXd ee = spec.e_vec() * spec.e_vec().transpose();
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(ee.data(), p * p);
  const Eigen::VectorXd v = k.fullPivLu().solve(rhs);
  Eigen::MatrixXd cov = Eigen::Map<const Eigen::MatrixXd>(v.data(), p, p);
  cov = 0.5 * (cov + cov.transpose()).eval();
  if (!cov.allFinite()) throw std::domain_error("stationary_covariance: non-finite solution");
  return cov;
}

Eigen::MatrixXd process_noise_covariance(const CarmaSpec& spec, double dt) {
  const int p = spec.p();
  const Eigen::MatrixXd& a = spec.companion();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  m.topLeftCorner(p, p) = -a;
  m.topRightCorner(p, p) = spec.e_vec() * spec.e_vec().transpose();
  m.bottomRightCorner(p, p) = a.transpose();
  const Eigen::MatrixXd g = matrix_exponential(m, dt);
  Eigen::MatrixXd q = g.bottomRightCorner(p, p).transpose() * g.topRightCorner(p, p);
  return 0.5 * (q + q.transpose());
}

std::vector<KalmanStep> kalman_pass(const CarmaSpec& spec, double rate,
                                    std::span<const Observation> obs) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("kalman_filter: noise variance rate must be positive");
  spec.require_stationary("kalman_filter");
  require_increasing_times(obs, "kalman_filter");
  const Eigen::VectorXd& b = spec.b_vec();
  const int p = spec.p();
  std::map<long long, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> cache;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd cov = rate * stationary_covariance(spec);
  std::vector<KalmanStep> steps;
  steps.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    KalmanStep s;
    if (i == 0) {
      s.predicted_state = x;
      s.predicted_covariance = cov;
    } else {
      const double dt = obs[i].t - obs[i - 1].t;
      const long long key = std::llround(dt * 1e12);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, std::make_pair(matrix_exponential(spec.companion(), dt),
                                               rate * process_noise_covariance(spec, dt)))
                 .first;
      }
      const auto& [phi, qd] = it->second;
      s.predicted_state = phi * x;
      Eigen::MatrixXd pc = phi * cov * phi.transpose() + qd;
      s.predicted_covariance = 0.5 * (pc + pc.transpose());
    }
    s.innovation = obs[i].y - b.dot(s.predicted_state);
    const Eigen::VectorXd pb = s.predicted_covariance * b;
    s.innovation_variance = b.dot(pb) + kInnovationJitter;
    const Eigen::VectorXd gain = pb / s.innovation_variance;
    s.filtered_state = s.predicted_state + gain * s.innovation;
    Eigen::MatrixXd fc = s.predicted_covariance - gain * pb.transpose();
    s.filtered_covariance = 0.5 * (fc + fc.transpose());
    if (!s.filtered_covariance.allFinite() || !s.filtered_state.allFinite()) {
      throw std::domain_error("kalman_filter: non-finite covariance");
    }
    x = s.filtered_state;
    cov = s.filtered_covariance;
    steps.push_back(std::move(s));
  }
  return steps;
}

FilteredStates kalman_filter(const CarmaSpec& spec, double rate, std::span<const Observation> obs) {
  const auto steps = kalman_pass(spec, rate, obs);
  FilteredStates out;
  out.method = FilterMethod::kalman;
  out.times.reserve(obs.size());
  out.states.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out.times.push_back(obs[i].t);
    out.states.push_back(steps[i].filtered_state);
  }
  return out;
}

double gaussian_loglik(const CarmaSpec& spec, double rate, std::span<const Observation> obs) {
  const auto steps = kalman_pass(spec, rate, obs);
  double ll = 0.0;
  for (const auto& s : steps) ll += normal_log_density(s.innovation, 0.0, s.innovation_variance);
  return ll;
}

}  // namespace lagcarma
