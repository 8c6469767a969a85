#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lagcarma {

/// Largest supported rule order. Beyond this the smallest standard Laguerre
/// weights underflow double precision.
inline constexpr int kMaxQuadratureOrder = 180;

/// Nodes and weights of an m-point (generalized) Gauss-Laguerre rule for the
/// weight x^alpha e^{-x} on (0, inf). Immutable once built.
class QuadratureRule {
 public:
  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  double alpha() const noexcept { return alpha_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// Natural log of each weight; stays finite where weights() underflows.
  std::span<const double> log_weights() const noexcept { return log_weights_; }

 private:
  friend QuadratureRule build_rule(int order, double alpha);
  QuadratureRule() = default;

  double alpha_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

/// Golub-Welsch construction on the Laguerre three-term recurrence, with
/// Newton polishing of the nodes and Christoffel-sum weights.
/// Throws std::invalid_argument for order < 1, order > kMaxQuadratureOrder
/// or alpha <= -1.
QuadratureRule build_rule(int order, double alpha = 0.0);

/// Sum of w_i f(k_i). Throws EvaluationError if f is not finite at a node.
double integrate(const QuadratureRule& rule, const std::function<double(double)>& f);

struct ConvergencePoint {
  int order;
  double abs_error;
};

/// Absolute error of the order-m rule against a known reference, per order.
/// Empirical stand-in for the analytic 2m-th derivative remainder.
std::vector<ConvergencePoint> convergence_profile(const std::function<double(double)>& f,
                                                  std::span<const int> orders, double reference,
                                                  double alpha = 0.0);

}  // namespace lagcarma
