#include "lagcarma/quadrature.hpp"

#include "lagcarma/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lagcarma {

namespace {

struct RecurrenceValue {
  double p = 0.0;      // orthonormal p_m(x), scaled by exp(-log_scale)
  double dp = 0.0;     // derivative, same scale
  double log_christoffel_sum = 0.0;  // log sum_{j<m} p_j(x)^2 (unscaled)
};

// Orthonormal generalized-Laguerre recurrence
//   sqrt(b_{j+1}) p_{j+1} = (x - a_j) p_j - sqrt(b_j) p_{j-1},
//   a_j = 2j + alpha + 1, b_j = j (j + alpha), p_0 = Gamma(alpha+1)^{-1/2}.
// Values are rescaled on the fly so large nodes do not overflow.
RecurrenceValue orthonormal_recurrence(double x, double alpha, int m) {
  constexpr double kBig = 1e150;
  constexpr double kShrink = 1e-150;
  const double log_shrink = std::log(kShrink);

  double p_prev = 0.0;
  double p = std::exp(-0.5 * std::lgamma(alpha + 1.0));
  double dp_prev = 0.0;
  double dp = 0.0;
  double sum = 0.0;
  double log_scale = 0.0;

  for (int j = 0; j < m; ++j) {
    sum += p * p;
    const double a_j = 2.0 * j + alpha + 1.0;
    const double sb_j = std::sqrt(j * (j + alpha));
    const double sb_next = std::sqrt((j + 1.0) * (j + 1.0 + alpha));
    const double p_next = ((x - a_j) * p - sb_j * p_prev) / sb_next;
    const double dp_next = (p + (x - a_j) * dp - sb_j * dp_prev) / sb_next;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
    if (std::abs(p) > kBig || std::abs(dp) > kBig) {
      p *= kShrink;
      p_prev *= kShrink;
      dp *= kShrink;
      dp_prev *= kShrink;
      sum *= kShrink * kShrink;
      log_scale -= log_shrink;
    }
  }
  return {p, dp, std::log(sum) + 2.0 * log_scale};
}

}  // namespace

QuadratureRule build_rule(int order, double alpha) {
  if (order < 1) throw std::invalid_argument("build_rule: order must be >= 1");
  if (order > kMaxQuadratureOrder) {
    std::ostringstream os;
    os << "build_rule: order " << order << " exceeds the supported maximum " << kMaxQuadratureOrder;
    throw std::invalid_argument(os.str());
  }
  if (!(alpha > -1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("build_rule: alpha must be finite and > -1");
  }

  const auto m = static_cast<Eigen::Index>(order);
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(m > 1 ? m - 1 : 0);
  for (Eigen::Index j = 0; j < m; ++j) diag(j) = 2.0 * static_cast<double>(j) + alpha + 1.0;
  for (Eigen::Index j = 1; j < m; ++j) {
    const double jd = static_cast<double>(j);
    sub(j - 1) = std::sqrt(jd * (jd + alpha));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConstructionError("build_rule: tridiagonal eigensolver did not converge");
  }
  Eigen::VectorXd x = solver.eigenvalues();  // ascending

  QuadratureRule rule;
  rule.alpha_ = alpha;
  rule.nodes_.resize(static_cast<std::size_t>(order));
  rule.weights_.resize(rule.nodes_.size());
  rule.log_weights_.resize(rule.nodes_.size());

  for (int i = 0; i < order; ++i) {
    double node = x(i);
    const double lo = i > 0 ? x(i - 1) : 0.0;
    const double hi = i + 1 < order ? x(i + 1) : std::numeric_limits<double>::infinity();
    for (int it = 0; it < 4; ++it) {
      const auto r = orthonormal_recurrence(node, alpha, order);
      if (r.dp == 0.0 || !std::isfinite(r.p / r.dp)) break;
      const double next = node - r.p / r.dp;
      if (!(next > lo && next < hi)) break;
      const double step = std::abs(next - node);
      node = next;
      if (step <= 4e-16 * node) break;
    }
    const auto r = orthonormal_recurrence(node, alpha, order);
    rule.nodes_[static_cast<std::size_t>(i)] = node;
    rule.log_weights_[static_cast<std::size_t>(i)] = -r.log_christoffel_sum;
    rule.weights_[static_cast<std::size_t>(i)] = std::exp(-r.log_christoffel_sum);
  }

  for (std::size_t i = 0; i < rule.nodes_.size(); ++i) {
    if (!(rule.nodes_[i] > 0.0) || (i > 0 && !(rule.nodes_[i] > rule.nodes_[i - 1]))) {
      throw ConstructionError("build_rule: nodes are not strictly positive and increasing");
    }
    if (!(rule.weights_[i] > 0.0)) {
      throw ConstructionError("build_rule: a weight underflowed to zero");
    }
  }
  return rule;
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& f) {
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = f(nodes[i]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrate: integrand is not finite at node " << nodes[i];
      throw EvaluationError(os.str(), nodes[i]);
    }
    total += weights[i] * v;
  }
  return total;
}

std::vector<ConvergencePoint> convergence_profile(const std::function<double(double)>& f,
                                                  std::span<const int> orders, double reference,
                                                  double alpha) {
  std::vector<ConvergencePoint> out;
  out.reserve(orders.size());
  for (int m : orders) {
    const auto rule = build_rule(m, alpha);
    out.push_back({m, std::abs(integrate(rule, f) - reference)});
  }
  return out;
}

}  // namespace lagcarma
