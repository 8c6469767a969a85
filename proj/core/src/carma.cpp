#include "lagcarma/carma.hpp"

#include "lagcarma/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lagcarma {

namespace {

constexpr double kDistinctGap = 1e-8;

std::complex<double> eval_poly(std::span<const double> c, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

}  // namespace

CarmaSpec::CarmaSpec(std::vector<double> ar, std::vector<double> ma)
    : ar_(std::move(ar)), ma_(std::move(ma)) {
  const int p = static_cast<int>(ar_.size());
  if (p < 1 || p > kMaxCarmaOrder) {
    throw std::invalid_argument("CarmaSpec: autoregressive order must be in [1, 10]");
  }
  if (ma_.empty() || static_cast<int>(ma_.size()) > p) {
    throw std::invalid_argument("CarmaSpec: need 0 <= q < p (ma has q+1 coefficients)");
  }
  for (double v : ar_)
    if (!std::isfinite(v)) throw std::invalid_argument("CarmaSpec: non-finite AR coefficient");
  for (double v : ma_)
    if (!std::isfinite(v)) throw std::invalid_argument("CarmaSpec: non-finite MA coefficient");
  if (ma_.back() == 0.0) throw std::invalid_argument("CarmaSpec: leading MA coefficient b_q is zero");

  companion_ = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i + 1 < p; ++i) companion_(i, i + 1) = 1.0;
  for (int j = 0; j < p; ++j) companion_(p - 1, j) = -ar_[static_cast<std::size_t>(p - 1 - j)];

  b_ = Eigen::VectorXd::Zero(p);
  for (std::size_t j = 0; j < ma_.size(); ++j) b_(static_cast<Eigen::Index>(j)) = ma_[j];
  e_ = Eigen::VectorXd::Zero(p);
  e_(p - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion_, false);
  const auto& ev = solver.eigenvalues();
  eigenvalues_.assign(ev.data(), ev.data() + ev.size());
  std::sort(eigenvalues_.begin(), eigenvalues_.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });

  stationary_ = std::all_of(eigenvalues_.begin(), eigenvalues_.end(),
                            [](auto l) { return l.real() < 0.0; });
  double radius = 0.0;
  for (auto l : eigenvalues_) radius = std::max(radius, std::abs(l));
  distinct_ = true;
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
    for (std::size_t j = i + 1; j < eigenvalues_.size(); ++j) {
      if (std::abs(eigenvalues_[i] - eigenvalues_[j]) <= kDistinctGap * radius) distinct_ = false;
    }
  }
}

double CarmaSpec::spectral_abscissa() const noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (auto l : eigenvalues_) m = std::max(m, l.real());
  return m;
}

bool CarmaSpec::is_invertible() const {
  const auto roots = polynomial_roots(ma_);
  return std::all_of(roots.begin(), roots.end(), [](auto r) { return r.real() < 0.0; });
}

void CarmaSpec::require_stationary(const char* caller) const {
  if (!stationary_) {
    std::ostringstream os;
    os << caller << ": CARMA spec is not stationary (spectral abscissa " << spectral_abscissa() << ")";
    throw std::domain_error(os.str());
  }
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  std::size_t n = coeffs.size();
  while (n > 0 && coeffs[n - 1] == 0.0) --n;
  if (n <= 1) return {};
  const auto deg = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 0; i + 1 < deg; ++i) c(i + 1, i) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) c(i, deg - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs[n - 1];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(c, false);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t) {
  const Eigen::MatrixXd at = a * t;
  return at.exp();
}

EigenDecomp spectral_decomposition(const CarmaSpec& spec) {
  if (!spec.has_distinct_eigenvalues()) {
    throw std::domain_error(
        "spectral_decomposition: eigenvalues are not distinct; use the matrix form of the kernel");
  }
  const int p = spec.p();
  // a'(z) = p z^{p-1} + (p-1) a_1 z^{p-2} + ... + a_{p-1}
  std::vector<double> da(static_cast<std::size_t>(p));
  const auto ar = spec.ar_coeffs();
  for (int k = 0; k < p; ++k) {
    // coefficient of z^k in a'(z): (k+1) * coefficient of z^{k+1} in a(z)
    const int power = k + 1;
    const double coef = power == p ? 1.0 : ar[static_cast<std::size_t>(p - power - 1)];
    da[static_cast<std::size_t>(k)] = power * coef;
  }
  EigenDecomp out;
  out.eigenvalues = spec.eigenvalues();
  out.alpha_weights.reserve(out.eigenvalues.size());
  for (auto l : out.eigenvalues) {
    out.alpha_weights.push_back(eval_poly(spec.ma_coeffs(), l) / eval_poly(da, l));
  }
  return out;
}

double kernel_matrix_form(const CarmaSpec& spec, double s) {
  return spec.b_vec().dot(matrix_exponential(spec.companion(), s) * spec.e_vec());
}

double kernel_spectral(const CarmaSpec& spec, double s) {
  const auto d = spectral_decomposition(spec);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < d.eigenvalues.size(); ++i) {
    acc += d.alpha_weights[i] * std::exp(d.eigenvalues[i] * s);
  }
  return acc.real();
}

double kernel(const CarmaSpec& spec, double s) { return kernel_matrix_form(spec, s); }

std::vector<double> kernel_values(const CarmaSpec& spec, std::span<const double> offsets) {
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double s : offsets) out.push_back(kernel_matrix_form(spec, s));
  return out;
}

ConditionalMoments conditional_moments(const CarmaSpec& spec, const Eigen::VectorXd& x0, double dt) {
  spec.require_stationary("conditional_moments");
  if (x0.size() != spec.p()) throw std::invalid_argument("conditional_moments: state has wrong dimension");
  const double mean = spec.b_vec().dot(matrix_exponential(spec.companion(), dt) * x0);
  return {mean, [spec](double s) {
            const double g = kernel_matrix_form(spec, s);
            return g * g;
          }};
}

CarmaSpec scale_normalize(const CarmaSpec& spec, double a_scale) {
  if (!(a_scale > 0.0) || !std::isfinite(a_scale)) {
    throw std::invalid_argument("scale_normalize: scale must be finite and > 0");
  }
  std::vector<double> ar(spec.ar_coeffs().begin(), spec.ar_coeffs().end());
  std::vector<double> ma(spec.ma_coeffs().begin(), spec.ma_coeffs().end());
  for (double& b : ma) b *= a_scale;
  return CarmaSpec(std::move(ar), std::move(ma));
}

double cumulant_of_integral(const std::function<double(double)>& cumulant,
                            const std::function<double(double)>& f, double horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("cumulant_of_integral: horizon must be >= 0");
  if (horizon == 0.0) return 0.0;
  auto integrand = [&](double u) {
    const double arg = f(u);
    const double v = cumulant(arg);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "cumulant_of_integral: cumulant not finite at u = " << u << " (argument " << arg << ")";
      throw DomainError(os.str(), u);
    }
    return v;
  };
  // Endpoints are part of the domain check; Gauss-Kronrod never samples them.
  integrand(0.0);
  integrand(horizon);
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, horizon, 15,
                                                                       1e-10);
}

}  // namespace lagcarma
