#include "lagcarma/pricing.hpp"

#include "lagcarma/errors.hpp"
#include "lagcarma/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lagcarma {

namespace {

// log sum_k P_k e^{V_k / 2}
double log_half_variance_mgf(const VarianceAtomSet& set) {
  const auto v = set.atoms();
  const auto p = set.probabilities();
  std::vector<double> terms(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) terms[k] = std::log(p[k]) + 0.5 * v[k];
  return log_sum_exp(terms);
}

double log_futures_base(const PricingSetup& s, double T) {
  return std::log(s.spot) + s.spec.b_vec().dot(matrix_exponential(s.spec.companion(), T - s.t0) * s.x0);
}

void check_strike(double strike) {
  if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("strike must be positive");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double black_price(OptionKind kind, double forward, double strike, double variance, double discount) {
  if (!(variance > 0.0)) {
    const double intrinsic = kind == OptionKind::call ? std::max(forward - strike, 0.0)
                                                      : std::max(strike - forward, 0.0);
    return discount * intrinsic;
  }
  const double sd = std::sqrt(variance);
  const double d1 = (std::log(forward / strike) + 0.5 * variance) / sd;
  const double d2 = d1 - sd;
  if (kind == OptionKind::call) return discount * (forward * normal_cdf(d1) - strike * normal_cdf(d2));
  return discount * (strike * normal_cdf(-d2) - forward * normal_cdf(-d1));
}

double nvmm_martingale_drift(const NvmmPricingSetup& setup, double T, const DiscreteMixing* discrete) {
  const double c = setup.theta + 0.5 * setup.sigma * setup.sigma;
  double log_mgf = 0.0;
  if (discrete != nullptr) {
    log_mgf = std::log(approx_mgf(*discrete, c));
  } else {
    log_mgf = T * setup.unit_law.cumulant(c);
    if (!std::isfinite(log_mgf)) {
      throw DomainError("nvmm pricing: theta + sigma^2/2 lies outside the mixing MGF domain", c);
    }
  }
  return setup.rate * T - log_mgf;
}

double nvmm_european_price(const NvmmPricingSetup& setup, OptionKind kind, double strike, double T,
                           const DiscreteMixing& mix) {
  check_strike(strike);
  if (!(T > 0.0)) throw std::invalid_argument("nvmm_european_price: T must be positive");
  if (!(setup.sigma > 0.0) || !(setup.spot > 0.0)) {
    throw std::invalid_argument("nvmm_european_price: need sigma > 0 and spot > 0");
  }
  const double mu = nvmm_martingale_drift(setup, T);
  const double discount = std::exp(-setup.rate * T);
  const auto u = mix.atoms();
  const auto p = mix.probabilities();
  double price = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double var = setup.sigma * setup.sigma * u[i];
    const double forward = setup.spot * std::exp(mu + setup.theta * u[i] + 0.5 * var);
    price += p[i] * black_price(kind, forward, strike, var, discount);
  }
  return price;
}

double nvmm_european_price(const NvmmPricingSetup& setup, OptionKind kind, double strike, double T,
                           int m, std::optional<bool> use_generalized) {
  if (!(T > 0.0)) throw std::invalid_argument("nvmm_european_price: T must be positive");
  const auto mix = discretize(setup.unit_law.at_horizon(T), m, use_generalized);
  return nvmm_european_price(setup, kind, strike, T, mix);
}

PricingSetup::PricingSetup(CarmaSpec spec_, MixingLaw law_, Eigen::VectorXd x0_)
    : x0(x0_.size() == 0 ? Eigen::VectorXd::Zero(spec_.p()) : std::move(x0_)),
      spec(std::move(spec_)),
      law(std::move(law_)) {
  if (x0.size() != spec.p()) throw std::invalid_argument("PricingSetup: state dimension mismatch");
}

VarianceAtomSet forward_variance_atoms(const PricingSetup& setup, double T0, double TF) {
  const auto grid = build_forward_grid(setup.spec, setup.t0, T0, TF, setup.n);
  return atoms_for_grid(grid, setup.law, setup.m, setup.atoms);
}

double futures_log_price_closed(const PricingSetup& setup, double T) {
  if (!(setup.spot > 0.0)) throw std::invalid_argument("futures pricing: spot must be positive");
  if (!(T >= setup.t0)) throw std::invalid_argument("futures pricing: maturity precedes valuation time");
  setup.spec.require_stationary("futures_log_price_closed");
  const double base = log_futures_base(setup, T);
  const double horizon = T - setup.t0;
  if (horizon == 0.0) return base;

  // Kernel peak over the horizon, checked against the cumulant domain.
  const double upper = setup.law.mgf_domain_upper();
  double peak = 0.0;
  constexpr int kProbe = 512;
  for (int i = 0; i <= kProbe; ++i) {
    const double g = kernel(setup.spec, horizon * i / kProbe);
    peak = std::max(peak, 0.5 * g * g);
  }
  if (!(peak < upper) && !std::isfinite(setup.law.cumulant(peak))) {
    std::ostringstream os;
    os << "futures_log_price_closed: half squared kernel reaches " << peak
       << ", outside the cumulant domain (upper " << upper << ")";
    throw DomainError(os.str(), peak);
  }
  const auto& spec = setup.spec;
  const auto& law = setup.law;
  const double integral = cumulant_of_integral(
      [&law](double c) { return law.cumulant(c); },
      [&spec, horizon](double u) {
        const double g = kernel(spec, horizon - u);
        return 0.5 * g * g;
      },
      horizon);
  return base + integral;
}

double futures_log_price_laguerre(const PricingSetup& setup, double T) {
  if (!(setup.spot > 0.0)) throw std::invalid_argument("futures pricing: spot must be positive");
  if (!(T >= setup.t0)) throw std::invalid_argument("futures pricing: maturity precedes valuation time");
  setup.spec.require_stationary("futures_log_price_laguerre");
  const double base = log_futures_base(setup, T);
  if (T == setup.t0) return base;
  return base + log_half_variance_mgf(forward_variance_atoms(setup, T, T));
}

std::vector<FuturesOptionQuote> futures_option_strip(const PricingSetup& setup, double T0, double TF,
                                                     std::span<const double> strikes,
                                                     FuturesOptionRoute route) {
  if (!(setup.t0 < T0 && T0 <= TF)) throw std::invalid_argument("futures option: need t0 < T0 <= TF");
  for (double k : strikes) check_strike(k);
  const double log_f = futures_log_price_laguerre(setup, TF);
  const double futures = std::exp(log_f);
  const auto set = forward_variance_atoms(setup, T0, TF);
  const double discount = std::exp(-setup.rate * (T0 - setup.t0));
  const double log_norm = log_half_variance_mgf(set);
  const auto v = set.atoms();
  const auto p = set.probabilities();

  std::vector<FuturesOptionQuote> out;
  out.reserve(strikes.size());
  for (double k : strikes) {
    double put = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double fwd = route == FuturesOptionRoute::fixed_forward
                             ? futures
                             : std::exp(log_f + 0.5 * v[i] - log_norm);
      put += p[i] * black_price(OptionKind::put, fwd, k, v[i], discount);
    }
    out.push_back({k, put + discount * (futures - k), put, futures});
  }
  return out;
}

double futures_option_price(const PricingSetup& setup, double T0, double TF, double strike,
                            OptionKind kind, FuturesOptionRoute route, bool direct_call) {
  if (kind == OptionKind::call && direct_call) {
    if (!(setup.t0 < T0 && T0 <= TF)) throw std::invalid_argument("futures option: need t0 < T0 <= TF");
    check_strike(strike);
    const double log_f = futures_log_price_laguerre(setup, TF);
    const auto set = forward_variance_atoms(setup, T0, TF);
    const double discount = std::exp(-setup.rate * (T0 - setup.t0));
    const double log_norm = log_half_variance_mgf(set);
    const auto v = set.atoms();
    const auto p = set.probabilities();
    double call = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double fwd = route == FuturesOptionRoute::fixed_forward ? std::exp(log_f)
                                                                    : std::exp(log_f + 0.5 * v[i] - log_norm);
      call += p[i] * black_price(OptionKind::call, fwd, strike, v[i], discount);
    }
    return call;
  }
  const double k[] = {strike};
  const auto q = futures_option_strip(setup, T0, TF, k, route).front();
  return kind == OptionKind::call ? q.call : q.put;
}

std::vector<McQuote> mc_futures_option_calls(const PricingSetup& setup, double T0, double TF,
                                             std::span<const double> strikes, int n_paths,
                                             std::uint64_t seed, int steps) {
  if (!(setup.t0 < T0 && T0 <= TF)) throw std::invalid_argument("futures option: need t0 < T0 <= TF");
  const double horizon = T0 - setup.t0;
  const auto paths = simulate_tcbm_carma(setup.spec, setup.law, horizon, horizon / steps, n_paths, seed,
                                         setup.x0, false);
  // ln F(T0, TF) = ln S_{t0} + b'e^{A(TF-T0)} X_{T0} + int_{T0}^{TF} kappa(g^2/2)
  PricingSetup tail = setup;
  tail.t0 = T0;
  tail.x0 = Eigen::VectorXd::Zero(setup.spec.p());
  const double drift = futures_log_price_closed(tail, TF) - std::log(setup.spot);
  const Eigen::RowVectorXd row =
      setup.spec.b_vec().transpose() * matrix_exponential(setup.spec.companion(), TF - T0);
  std::vector<double> log_f(paths.terminal_states.size());
  for (std::size_t i = 0; i < log_f.size(); ++i) {
    log_f[i] = std::log(setup.spot) + row.dot(paths.terminal_states[i]) + drift;
  }
  const double discount = std::exp(-setup.rate * horizon);
  std::vector<McQuote> out;
  std::vector<double> payoff(log_f.size());
  for (double k : strikes) {
    check_strike(k);
    for (std::size_t i = 0; i < log_f.size(); ++i) payoff[i] = discount * std::max(std::exp(log_f[i]) - k, 0.0);
    const auto est = mc_summary(payoff);
    out.push_back({k, est.mid, est.lower, est.upper});
  }
  return out;
}

McQuote mc_nvmm_price(const NvmmPricingSetup& setup, OptionKind kind, double strike, double T,
                      int n_paths, std::uint64_t seed) {
  check_strike(strike);
  const double mu = nvmm_martingale_drift(setup, T);
  const double discount = std::exp(-setup.rate * T);
  std::vector<double> payoff(static_cast<std::size_t>(n_paths));
  for (int k = 0; k < n_paths; ++k) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal;
    const double l = draw_increment(setup.unit_law, T, rng);
    const double y = mu + setup.theta * l + setup.sigma * std::sqrt(l) * normal(rng);
    const double s = setup.spot * std::exp(y);
    payoff[static_cast<std::size_t>(k)] =
        discount * (kind == OptionKind::call ? std::max(s - strike, 0.0) : std::max(strike - s, 0.0));
  }
  const auto est = mc_summary(payoff);
  return {strike, est.mid, est.lower, est.upper};
}

std::vector<TermStructureRow> term_structure(const PricingSetup& setup, std::span<const double> maturities,
                                             int mc_paths, std::uint64_t seed, int steps_per_maturity) {
  std::vector<TermStructureRow> rows;
  for (double T : maturities) {
    TermStructureRow row{T, std::exp(futures_log_price_laguerre(setup, T)),
                         std::exp(futures_log_price_closed(setup, T)), std::nullopt, std::nullopt,
                         std::nullopt};
    if (mc_paths > 0 && T > setup.t0) {
      const double horizon = T - setup.t0;
      const auto paths = simulate_tcbm_carma(setup.spec, setup.law, horizon, horizon / steps_per_maturity,
                                             mc_paths, seed, setup.x0, false);
      const auto est = mc_price([&setup](double y) { return setup.spot * std::exp(y); }, paths);
      row.mc_mid = est.mid;
      row.mc_lower = est.lower;
      row.mc_upper = est.upper;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lagcarma
