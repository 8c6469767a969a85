#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/mixing.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace lagcarma {

/// Per-path generator keyed by (seed, stream) so results do not depend on
/// the order in which paths are produced.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Subordinator increments over `steps` steps of length dt. Throws
/// std::invalid_argument for GIG (no closed increment law).
std::vector<double> simulate_subordinator(const MixingLaw& law, double dt, int steps,
                                          std::uint64_t seed, std::uint64_t stream = 0);

/// Draws one increment of the unit law over a step dt (degenerate law: no draws).
double draw_increment(const MixingLaw& law, double dt, std::mt19937_64& rng);

struct PathSet {
  std::vector<double> times;
  /// paths[k][i] = Y of path k at times[i].
  std::vector<std::vector<double>> paths;
  /// Y_T and X_T of every path (kept even when full paths are dropped).
  std::vector<double> terminal_values;
  std::vector<Eigen::VectorXd> terminal_states;
  std::uint64_t seed = 0;
  double dt = 0.0;
};

/// Euler scheme X += A X dt + e sqrt(dLambda) Z, Y = b'X, on the grid
/// 0, dt, ..., T (last step shortened to land on T).
PathSet simulate_tcbm_carma(const CarmaSpec& spec, const MixingLaw& law, double T, double dt,
                            int n_paths, std::uint64_t seed, const Eigen::VectorXd& x0,
                            bool keep_paths = true);

/// Single path sampled on every `subsample`-th Euler step, as (t, y) rows.
std::vector<std::pair<double, double>> simulate_observations(const CarmaSpec& spec,
                                                             const MixingLaw& law, double T,
                                                             double dt, int subsample,
                                                             std::uint64_t seed,
                                                             const Eigen::VectorXd& x0);

/// Independent draws of mu + theta L + sigma sqrt(L) Z with L from the unit law.
std::vector<double> simulate_nvmm(const NvmmParams& params, const MixingLaw& law, int count,
                                  std::uint64_t seed);

struct McEstimate {
  double mid;
  double lower;
  double upper;
  double standard_error;
  int n;
};

/// Sample mean with 5%/95% normal-approximation bounds of the mean.
McEstimate mc_summary(const std::vector<double>& samples);

/// Monte Carlo price of payoff(Y_T) discounted by `discount`.
McEstimate mc_price(const std::function<double(double)>& payoff, const PathSet& paths,
                    double discount = 1.0);

}  // namespace lagcarma
