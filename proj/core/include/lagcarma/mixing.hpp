#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lagcarma {

/// Gamma(shape, rate): density rate^shape / Gamma(shape) u^{shape-1} e^{-rate u}.
struct GammaLaw {
  double shape;
  double rate;
};

/// IG(a, b): density a / sqrt(2 pi) u^{-3/2} exp(ab - (a^2/u + b^2 u) / 2), mean a/b.
struct InverseGaussianLaw {
  double a;
  double b;
};

/// GIG(a, b, p): density (a/b)^{p/2} / (2 K_p(sqrt(ab))) u^{p-1} exp(-(a u + b/u) / 2).
struct GigLaw {
  double a;
  double b;
  double p;
};

/// Deterministic clock Lambda_t = value * t. Turns the TCBm into a scaled Brownian motion.
struct DegenerateLaw {
  double value;
};

enum class LawFamily { gamma, inverse_gaussian, gig, degenerate };

std::string to_string(LawFamily family);
LawFamily parse_law_family(const std::string& name);

/// The three-part representation e^{-phi_plus u} u^{lambda-1} L(u) of a
/// mixing density. L is carried in log form.
struct SlowlyVaryingForm {
  double phi_plus;
  double lambda;
  std::function<double(double)> log_slowly_varying;
};

/// Distribution of the subordinator at unit time (or of a single mixing
/// variable). Value type; all members are pure.
class MixingLaw {
 public:
  using Params = std::variant<GammaLaw, InverseGaussianLaw, GigLaw, DegenerateLaw>;

  explicit MixingLaw(Params params);

  static MixingLaw gamma(double shape, double rate) { return MixingLaw(GammaLaw{shape, rate}); }
  static MixingLaw inverse_gaussian(double a, double b) {
    return MixingLaw(InverseGaussianLaw{a, b});
  }
  static MixingLaw gig(double a, double b, double p) { return MixingLaw(GigLaw{a, b, p}); }
  static MixingLaw degenerate(double value) { return MixingLaw(DegenerateLaw{value}); }

  const Params& params() const noexcept { return params_; }
  LawFamily family() const noexcept;

  /// Law of the increment Lambda_{t+h} - Lambda_t. Gamma and IG stay in
  /// family with shape*h and a*h; GIG throws std::invalid_argument.
  MixingLaw at_horizon(double h) const;

  /// phi_plus, lambda and log L. Throws std::logic_error for the degenerate law.
  SlowlyVaryingForm slowly_varying_form() const;

  double density(double u) const;
  double log_density(double u) const;
  double mean() const;

  /// Supremum of the MGF convergence domain (c must stay below it; IG also
  /// admits equality).
  double mgf_domain_upper() const;

  /// Closed form for Gamma/IG/degenerate; adaptive quadrature of the density
  /// for GIG. Throws DomainError outside the convergence domain.
  double analytic_mgf(double c) const;

  /// log E[e^{c Lambda_1}]; +infinity outside the domain (never throws).
  double cumulant(double c) const;

 private:
  Params params_;
};

/// The m-atom random variable approximating a mixing law: atoms
/// u_i = k_i / phi_plus with normalized quadrature masses.
class DiscreteMixing {
 public:
  DiscreteMixing(std::vector<double> atoms, std::vector<double> probabilities, int source_order,
                 double generalized_alpha);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  int source_order() const noexcept { return source_order_; }
  double generalized_alpha() const noexcept { return generalized_alpha_; }
  double mean() const;

 private:
  std::vector<double> atoms_;
  std::vector<double> probabilities_;
  int source_order_;
  double generalized_alpha_;
};

/// Automatic rule selection: the generalized rule with alpha = lambda - 1 is
/// used when 0 < lambda < 1; otherwise the standard rule. `use_generalized`
/// overrides.
DiscreteMixing discretize(const SlowlyVaryingForm& form, int order,
                          std::optional<bool> use_generalized = std::nullopt);
DiscreteMixing discretize(const MixingLaw& law, int order,
                          std::optional<bool> use_generalized = std::nullopt);

double approx_mgf(const DiscreteMixing& mix, double c);
double analytic_mgf(const MixingLaw& law, double c);

/// Location mu, mixing drift theta and scale sigma of Y = mu + theta L + sigma sqrt(L) Z.
struct NvmmParams {
  double mu;
  double theta;
  double sigma;
};

double nvmm_log_density(const NvmmParams& params, const DiscreteMixing& mix, double y);
double nvmm_density(const NvmmParams& params, const DiscreteMixing& mix, double y);

/// log phi(y; mean, variance).
double normal_log_density(double y, double mean, double variance);

/// Numerically stable log(sum exp(v_i)).
double log_sum_exp(std::span<const double> values);

}  // namespace lagcarma
