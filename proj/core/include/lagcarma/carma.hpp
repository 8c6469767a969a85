#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace lagcarma {

inline constexpr int kMaxCarmaOrder = 10;

/// Eigenvalues of the companion matrix and the weights alpha(l) = b(l) / a'(l)
/// of the CAR(1) decomposition of the kernel.
struct EigenDecomp {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<std::complex<double>> alpha_weights;
};

/// CARMA(p, q) model: Y = b'X, dX = A X dt + e dZ.
///
/// `ar` holds a_1..a_p (the companion's last row is -a_p .. -a_1) and `ma`
/// holds b_0..b_q. The moving-average vector is zero-padded to length p.
class CarmaSpec {
 public:
  CarmaSpec(std::vector<double> ar, std::vector<double> ma);

  int p() const noexcept { return static_cast<int>(ar_.size()); }
  int q() const noexcept { return static_cast<int>(ma_.size()) - 1; }
  std::span<const double> ar_coeffs() const noexcept { return ar_; }
  std::span<const double> ma_coeffs() const noexcept { return ma_; }

  const Eigen::MatrixXd& companion() const noexcept { return companion_; }
  const Eigen::VectorXd& b_vec() const noexcept { return b_; }
  const Eigen::VectorXd& e_vec() const noexcept { return e_; }

  const std::vector<std::complex<double>>& eigenvalues() const noexcept { return eigenvalues_; }
  /// All eigenvalues strictly in the left half-plane.
  bool is_stationary() const noexcept { return stationary_; }
  /// Pairwise eigenvalue gaps exceed 1e-8 relative to the spectral radius.
  bool has_distinct_eigenvalues() const noexcept { return distinct_; }
  /// Largest real part of the spectrum.
  double spectral_abscissa() const noexcept;

  /// Roots of b(z) = b_0 + ... + b_q z^q all in the open left half-plane.
  bool is_invertible() const;

  /// Throws std::domain_error unless stationary.
  void require_stationary(const char* caller) const;

 private:
  std::vector<double> ar_;
  std::vector<double> ma_;
  Eigen::MatrixXd companion_;
  Eigen::VectorXd b_;
  Eigen::VectorXd e_;
  std::vector<std::complex<double>> eigenvalues_;
  bool stationary_ = false;
  bool distinct_ = false;
};

/// Roots of c_0 + c_1 z + ... + c_n z^n via a companion eigenproblem.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

/// e^{A t} by scaling and squaring with a degree-13 Pade approximant.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t);

/// Throws std::domain_error if eigenvalues are not distinct.
EigenDecomp spectral_decomposition(const CarmaSpec& spec);

/// g(s) = b' e^{A s} e.
double kernel_matrix_form(const CarmaSpec& spec, double s);
/// g(s) = sum_i alpha(l_i) e^{l_i s}; throws std::domain_error if the
/// eigenvalues are not distinct (use kernel_matrix_form).
double kernel_spectral(const CarmaSpec& spec, double s);
/// Matrix form; the spectral form is a cross-check only.
double kernel(const CarmaSpec& spec, double s);

/// Kernel values g(s_j) for a batch of offsets.
std::vector<double> kernel_values(const CarmaSpec& spec, std::span<const double> offsets);

struct ConditionalMoments {
  double mean;
  /// (b' e^{As} e)^2, integrand of the conditional variance.
  std::function<double(double)> variance_kernel;
};

ConditionalMoments conditional_moments(const CarmaSpec& spec, const Eigen::VectorXd& x0, double dt);

/// Same model with b scaled by a_scale (noise scaled by 1/a_scale).
CarmaSpec scale_normalize(const CarmaSpec& spec, double a_scale);

/// int_0^T cumulant(f(u)) du by adaptive Gauss-Kronrod (relative 1e-10).
/// Throws DomainError carrying the offending u if the cumulant is not finite.
double cumulant_of_integral(const std::function<double(double)>& cumulant,
                            const std::function<double(double)>& f, double horizon);

}  // namespace lagcarma
