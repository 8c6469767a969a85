#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/mixing.hpp"
#include "lagcarma/state_filter.hpp"
#include "lagcarma/timeseries.hpp"
#include "lagcarma/transition.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lagcarma {

/// How the joint scale of b and the subordinator is pinned down.
enum class Identification {
  /// Law scale fixed (Gamma rate = 1, IG b = 1); all of b estimated.
  law_scale,
  /// Leading MA coefficient b_q fixed at 1; law scale estimated.
  ma_leading,
};

struct FitConfig {
  int n = 2;
  int m = 2;
  FilterMethod filter = FilterMethod::kalman;
  int max_evaluations = 3000;
  /// Natural-scale (lo, hi) bounds by parameter name; unlisted parameters are
  /// only constrained to be positive.
  std::map<std::string, std::pair<double, double>> bounds;
  Identification identification = Identification::law_scale;
  std::uint64_t seed = 0;
  /// Additional randomly perturbed starts (seeded) after the first.
  int restarts = 0;
  /// Starting values by parameter name; missing ones come from a Gaussian
  /// CARMA fit.
  std::map<std::string, double> initial;
  bool standard_errors = false;
  AtomBuildOptions atoms{};
};

struct FitResult {
  /// Estimated and fixed parameters by name (a1.., b0.., law parameters).
  std::map<std::string, double> estimates;
  /// Names of the parameters that were held fixed.
  std::vector<std::string> fixed;
  double loglik = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::optional<std::map<std::string, double>> standard_errors;
};

/// Parameter names in report order for a CARMA(p, q) with the given law.
std::vector<std::string> parameter_names(int p, int q, LawFamily family);

/// Builds the model from named parameters.
CarmaSpec spec_from_estimates(const std::map<std::string, double>& est, int p, int q);
MixingLaw law_from_estimates(const std::map<std::string, double>& est, LawFamily family);

/// GL likelihood at fixed parameters, with states from the configured filter.
LogLikelihood tcbm_loglik(const CarmaSpec& spec, const MixingLaw& law, std::span<const Observation> data,
                          const FitConfig& config);

FitResult fit_tcbm_carma(std::span<const Observation> data, int p, int q, LawFamily family,
                         const FitConfig& config);

/// Gaussian CARMA (Brownian noise with unit variance rate) by exact Kalman likelihood.
FitResult fit_gaussian_carma(std::span<const Observation> data, int p, int q, const FitConfig& config);

struct EmInit {
  NvmmParams nvmm;
  MixingLaw law;
};

struct EmResult {
  NvmmParams nvmm;
  MixingLaw law;
  double loglik;
  int iterations;
  bool converged;
  /// Observed-data log-likelihood before the first and after every iteration.
  std::vector<double> history;
};

/// EM for the m-atom NVMM with fixed Laguerre nodes. The law's scale
/// (phi_plus) is held at its initial value; the shape parameter (Gamma
/// shape, IG a) is updated numerically. m = 1 keeps theta fixed.
EmResult em_fit_nvmm(std::span<const double> data, int m, const EmInit& init, int max_iter = 500,
                     double tol = 1e-8);

/// Observed-data log-likelihood of the m-atom NVMM with standard-rule atoms.
double nvmm_loglik(std::span<const double> data, const NvmmParams& params, const MixingLaw& law, int m);

}  // namespace lagcarma
