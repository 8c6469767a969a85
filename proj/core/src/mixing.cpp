#include "lagcarma/mixing.hpp"

#include "lagcarma/errors.hpp"
#include "lagcarma/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lagcarma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("MixingLaw: ") + what + " must be finite and > 0");
  }
}

double gig_log_norm(const GigLaw& g) {
  const double k = boost::math::cyl_bessel_k(g.p, std::sqrt(g.a * g.b));
  return 0.5 * g.p * std::log(g.a / g.b) - std::log(2.0 * k);
}

double gig_mgf_quadrature(const GigLaw& g, double c) {
  const double log_norm = gig_log_norm(g);
  auto integrand = [&](double u) {
    if (!(u > 0.0)) return 0.0;
    const double lv = log_norm + (g.p - 1.0) * std::log(u) - 0.5 * (g.a * u + g.b / u) + c * u;
    return std::exp(lv);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(integrand, 1e-10);
}

}  // namespace

std::string to_string(LawFamily family) {
  switch (family) {
    case LawFamily::gamma:
      return "gamma";
    case LawFamily::inverse_gaussian:
      return "inverse_gaussian";
    case LawFamily::gig:
      return "gig";
    case LawFamily::degenerate:
      return "degenerate";
  }
  return "unknown";
}

LawFamily parse_law_family(const std::string& name) {
  if (name == "gamma") return LawFamily::gamma;
  if (name == "inverse_gaussian" || name == "ig") return LawFamily::inverse_gaussian;
  if (name == "gig") return LawFamily::gig;
  if (name == "degenerate") return LawFamily::degenerate;
  throw std::invalid_argument("unknown law family '" + name + "'");
}

MixingLaw::MixingLaw(Params params) : params_(params) {
  std::visit(Overloaded{
                 [](const GammaLaw& g) {
                   require_positive(g.shape, "gamma shape");
                   require_positive(g.rate, "gamma rate");
                 },
                 [](const InverseGaussianLaw& g) {
                   require_positive(g.a, "inverse gaussian a");
                   require_positive(g.b, "inverse gaussian b");
                 },
                 [](const GigLaw& g) {
                   require_positive(g.a, "gig a");
                   require_positive(g.b, "gig b");
                   if (!std::isfinite(g.p)) throw std::invalid_argument("MixingLaw: gig p must be finite");
                 },
                 [](const DegenerateLaw& g) { require_positive(g.value, "degenerate value"); },
             },
             params_);
}

LawFamily MixingLaw::family() const noexcept {
  return std::visit(Overloaded{
                        [](const GammaLaw&) { return LawFamily::gamma; },
                        [](const InverseGaussianLaw&) { return LawFamily::inverse_gaussian; },
                        [](const GigLaw&) { return LawFamily::gig; },
                        [](const DegenerateLaw&) { return LawFamily::degenerate; },
                    },
                    params_);
}

MixingLaw MixingLaw::at_horizon(double h) const {
  require_positive(h, "horizon");
  return std::visit(Overloaded{
                        [h](const GammaLaw& g) { return MixingLaw::gamma(g.shape * h, g.rate); },
                        [h](const InverseGaussianLaw& g) {
                          return MixingLaw::inverse_gaussian(g.a * h, g.b);
                        },
                        [](const GigLaw&) -> MixingLaw {
                          throw std::invalid_argument(
                              "MixingLaw::at_horizon: GIG increments have no closed law");
                        },
                        [h](const DegenerateLaw& g) { return MixingLaw::degenerate(g.value * h); },
                    },
                    params_);
}

SlowlyVaryingForm MixingLaw::slowly_varying_form() const {
  return std::visit(
      Overloaded{
          [](const GammaLaw& g) {
            const double log_l = g.shape * std::log(g.rate) - std::lgamma(g.shape);
            return SlowlyVaryingForm{g.rate, g.shape, [log_l](double) { return log_l; }};
          },
          [](const InverseGaussianLaw& g) {
            const double log_c = std::log(g.a / std::sqrt(2.0 * std::numbers::pi)) + g.a * g.b;
            const double half_a2 = 0.5 * g.a * g.a;
            return SlowlyVaryingForm{0.5 * g.b * g.b, -0.5,
                                     [log_c, half_a2](double u) { return log_c - half_a2 / u; }};
          },
          [](const GigLaw& g) {
            const double log_c = gig_log_norm(g);
            const double half_b = 0.5 * g.b;
            return SlowlyVaryingForm{0.5 * g.a, g.p,
                                     [log_c, half_b](double u) { return log_c - half_b / u; }};
          },
          [](const DegenerateLaw&) -> SlowlyVaryingForm {
            throw std::logic_error("degenerate law has no density representation");
          },
      },
      params_);
}

double MixingLaw::log_density(double u) const {
  if (!(u > 0.0)) return -kInf;
  const auto form = slowly_varying_form();
  return -form.phi_plus * u + (form.lambda - 1.0) * std::log(u) + form.log_slowly_varying(u);
}

double MixingLaw::density(double u) const { return std::exp(log_density(u)); }

double MixingLaw::mean() const {
  return std::visit(Overloaded{
                        [](const GammaLaw& g) { return g.shape / g.rate; },
                        [](const InverseGaussianLaw& g) { return g.a / g.b; },
                        [](const GigLaw& g) {
                          const double w = std::sqrt(g.a * g.b);
                          return std::sqrt(g.b / g.a) * boost::math::cyl_bessel_k(g.p + 1.0, w) /
                                 boost::math::cyl_bessel_k(g.p, w);
                        },
                        [](const DegenerateLaw& g) { return g.value; },
                    },
                    params_);
}

double MixingLaw::mgf_domain_upper() const {
  return std::visit(Overloaded{
                        [](const GammaLaw& g) { return g.rate; },
                        [](const InverseGaussianLaw& g) { return 0.5 * g.b * g.b; },
                        [](const GigLaw& g) { return 0.5 * g.a; },
                        [](const DegenerateLaw&) { return kInf; },
                    },
                    params_);
}

double MixingLaw::cumulant(double c) const {
  return std::visit(Overloaded{
                        [c](const GammaLaw& g) {
                          if (!(c < g.rate)) return kInf;
                          return -g.shape * std::log1p(-c / g.rate);
                        },
                        [c](const InverseGaussianLaw& g) {
                          const double s = 1.0 - 2.0 * c / (g.b * g.b);
                          if (!(s >= 0.0)) return kInf;
                          return g.a * g.b * (1.0 - std::sqrt(s));
                        },
                        [c](const GigLaw& g) {
                          if (!(c < 0.5 * g.a)) return kInf;
                          return std::log(gig_mgf_quadrature(g, c));
                        },
                        [c](const DegenerateLaw& g) { return c * g.value; },
                    },
                    params_);
}

double MixingLaw::analytic_mgf(double c) const {
  const double k = cumulant(c);
  if (!std::isfinite(k)) {
    std::ostringstream os;
    os << "analytic_mgf: c = " << c << " outside the convergence domain of the " << to_string(family())
       << " law";
    throw DomainError(os.str(), c);
  }
  return std::exp(k);
}

double analytic_mgf(const MixingLaw& law, double c) { return law.analytic_mgf(c); }

DiscreteMixing::DiscreteMixing(std::vector<double> atoms, std::vector<double> probabilities,
                               int source_order, double generalized_alpha)
    : atoms_(std::move(atoms)),
      probabilities_(std::move(probabilities)),
      source_order_(source_order),
      generalized_alpha_(generalized_alpha) {
  if (atoms_.empty() || atoms_.size() != probabilities_.size()) {
    throw ConstructionError("DiscreteMixing: atoms and probabilities must be non-empty and aligned");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(atoms_[i] > 0.0) || (i > 0 && !(atoms_[i] > atoms_[i - 1]))) {
      throw ConstructionError("DiscreteMixing: atoms must be positive and strictly increasing");
    }
    if (!(probabilities_[i] > 0.0)) {
      throw ConstructionError("DiscreteMixing: probabilities must be positive");
    }
  }
}

double DiscreteMixing::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += atoms_[i] * probabilities_[i];
  return s;
}

DiscreteMixing discretize(const SlowlyVaryingForm& form, int order,
                          std::optional<bool> use_generalized) {
  if (!(form.phi_plus > 0.0)) {
    throw std::invalid_argument("discretize: phi_plus must be > 0");
  }
  const bool generalized =
      use_generalized.value_or(form.lambda > 0.0 && form.lambda < 1.0);
  const double rule_alpha = generalized ? form.lambda - 1.0 : 0.0;
  const auto rule = build_rule(order, rule_alpha);

  const auto nodes = rule.nodes();
  const auto log_w = rule.log_weights();
  std::vector<double> atoms;
  std::vector<double> log_mass;
  atoms.reserve(nodes.size());
  log_mass.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double k = nodes[i];
    const double u = k / form.phi_plus;
    // Generalized rule absorbs k^{lambda-1}; the constant phi^{-lambda} cancels on normalization.
    const double lm = generalized
                          ? log_w[i] + form.log_slowly_varying(u)
                          : log_w[i] - std::log(k) + form.lambda * std::log(u) + form.log_slowly_varying(u);
    if (std::isnan(lm) || lm == kInf) {
      std::ostringstream os;
      os << "discretize: non-finite mass at node " << k;
      throw ConstructionError(os.str());
    }
    if (lm == -kInf) continue;
    atoms.push_back(u);
    log_mass.push_back(lm);
  }
  if (atoms.empty()) throw ConstructionError("discretize: every node carries zero mass");

  const double norm = log_sum_exp(log_mass);
  std::vector<double> probs;
  std::vector<double> kept_atoms;
  probs.reserve(atoms.size());
  kept_atoms.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double p = std::exp(log_mass[i] - norm);
    if (p > 0.0) {
      probs.push_back(p);
      kept_atoms.push_back(atoms[i]);
    }
  }
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  return DiscreteMixing(std::move(kept_atoms), std::move(probs), order, rule_alpha);
}

DiscreteMixing discretize(const MixingLaw& law, int order, std::optional<bool> use_generalized) {
  if (order < 1) throw std::invalid_argument("discretize: order must be >= 1");
  if (const auto* d = std::get_if<DegenerateLaw>(&law.params())) {
    return DiscreteMixing({d->value}, {1.0}, 1, 0.0);
  }
  return discretize(law.slowly_varying_form(), order, use_generalized);
}

double approx_mgf(const DiscreteMixing& mix, double c) {
  const auto atoms = mix.atoms();
  const auto probs = mix.probabilities();
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) s += std::exp(c * atoms[i]) * probs[i];
  return s;
}

double normal_log_density(double y, double mean, double variance) {
  const double d = y - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -kInf;
  const double mx = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : values) s += std::exp(v - mx);
  return mx + std::log(s);
}

double nvmm_log_density(const NvmmParams& params, const DiscreteMixing& mix, double y) {
  const auto atoms = mix.atoms();
  const auto probs = mix.probabilities();
  std::vector<double> terms(atoms.size());
  const double s2 = params.sigma * params.sigma;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    terms[i] = std::log(probs[i]) +
               normal_log_density(y, params.mu + params.theta * atoms[i], s2 * atoms[i]);
  }
  return log_sum_exp(terms);
}

double nvmm_density(const NvmmParams& params, const DiscreteMixing& mix, double y) {
  return std::exp(nvmm_log_density(params, mix, y));
}

}  // namespace lagcarma
