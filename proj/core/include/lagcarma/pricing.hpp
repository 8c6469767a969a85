#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/mixing.hpp"
#include "lagcarma/transition.hpp"
#include "lagcarma/variance_grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lagcarma {

enum class OptionKind { call, put };

/// Black-Scholes-type price of a European option on a lognormal quantity with
/// the given forward and total log-variance, discounted by `discount`.
/// Zero variance returns the discounted intrinsic value.
double black_price(OptionKind kind, double forward, double strike, double variance, double discount);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Exponential NVMM: S_T = S0 exp(mu_T + theta L_T + sigma sqrt(L_T) Z) with
/// L_T the mixing law at horizon T. mu_T is chosen so E[S_T] = S0 e^{rT}.
struct NvmmPricingSetup {
  MixingLaw unit_law;
  double theta;
  double sigma;
  double spot;
  double rate;
};

/// log E[e^{c L_T}] correction used for the martingale drift: the analytic
/// cumulant by default, the discretized mixing's MGF when `discrete_drift`.
double nvmm_martingale_drift(const NvmmPricingSetup& setup, double T,
                             const DiscreteMixing* discrete = nullptr);

double nvmm_european_price(const NvmmPricingSetup& setup, OptionKind kind, double strike, double T,
                           int m, std::optional<bool> use_generalized = std::nullopt);

/// Same price from a prebuilt discretization of the horizon-T law.
double nvmm_european_price(const NvmmPricingSetup& setup, OptionKind kind, double strike, double T,
                           const DiscreteMixing& mix);

/// Risk-neutral exponential TCBm-CARMA: S_t = S_{t0} exp(Y_t).
struct PricingSetup {
  double spot = 1.0;
  double rate = 0.0;
  double t0 = 0.0;
  Eigen::VectorXd x0;
  CarmaSpec spec;
  MixingLaw law;
  int n = 8;
  int m = 16;
  /// Coarser merging than the library default keeps m = 16 tractable.
  AtomBuildOptions atoms{PruningSettings{1e-3, 1e-14}};

  PricingSetup(CarmaSpec spec_, MixingLaw law_, Eigen::VectorXd x0_ = {});
};

/// Discretized forward integrated variance over [t0, T0] for a futures
/// contract maturing at TF (TF = T0 gives the spot integrated variance).
VarianceAtomSet forward_variance_atoms(const PricingSetup& setup, double T0, double TF);

double futures_log_price_closed(const PricingSetup& setup, double T);
double futures_log_price_laguerre(const PricingSetup& setup, double T);

enum class FuturesOptionRoute {
  /// Black formula per variance atom with the unconditional futures price.
  fixed_forward,
  /// Black formula per atom with the futures price conditioned on the
  /// variance atom, F e^{V/2} / sum_j P_j e^{V_j/2}.
  conditional_forward,
};

struct FuturesOptionQuote {
  double strike;
  double call;
  double put;
  double futures;
};

/// Put priced as a mixture; call from put-call parity (or as a mixture of
/// calls when `direct_call`).
double futures_option_price(const PricingSetup& setup, double T0, double TF, double strike,
                            OptionKind kind, FuturesOptionRoute route = FuturesOptionRoute::conditional_forward,
                            bool direct_call = false);

/// Prices a strike strip reusing one atom set.
std::vector<FuturesOptionQuote> futures_option_strip(
    const PricingSetup& setup, double T0, double TF, std::span<const double> strikes,
    FuturesOptionRoute route = FuturesOptionRoute::conditional_forward);

struct McQuote {
  double strike;
  double mid;
  double lower;
  double upper;
};

/// Monte Carlo call prices on F(T0, TF): Euler paths of the state to T0
/// (step T0 / steps), futures price from the closed form given X_{T0}.
std::vector<McQuote> mc_futures_option_calls(const PricingSetup& setup, double T0, double TF,
                                             std::span<const double> strikes, int n_paths,
                                             std::uint64_t seed, int steps = 200);

/// Monte Carlo price of a European option under the exponential NVMM.
McQuote mc_nvmm_price(const NvmmPricingSetup& setup, OptionKind kind, double strike, double T,
                      int n_paths, std::uint64_t seed);

struct TermStructureRow {
  double T;
  double laguerre;
  double closed;
  std::optional<double> mc_mid;
  std::optional<double> mc_lower;
  std::optional<double> mc_upper;
};

/// Futures prices at each maturity. MC columns are filled when mc_paths > 0
/// (Euler step T / steps_per_maturity).
std::vector<TermStructureRow> term_structure(const PricingSetup& setup, std::span<const double> maturities,
                                             int mc_paths = 0, std::uint64_t seed = 0,
                                             int steps_per_maturity = 200);

}  // namespace lagcarma
