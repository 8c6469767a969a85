#pragma once

#include "lagcarma/estimation.hpp"
#include "lagcarma/pricing.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lagcarma {

// Pinned reproduction recipes shared by the CLI and the acceptance suite.

/// Mixture MGF of Y_t given X_{t0} against the closed form for a VG-CAR(1).
struct MgfComparison {
  double c;
  double mixture;
  double closed;
  double relative_error;
};

struct MgfStudy {
  std::size_t atom_count;
  AtomMode mode;
  std::vector<MgfComparison> rows;
};

/// a = 0.25, Gamma(1, 1), t - t0 = 1/4, n = 6, m = 2 with exact enumeration,
/// c on 11 equally spaced points of [-1, 1].
MgfStudy repro_ou_mgf();

struct BlockFit {
  std::uint64_t seed;
  FilterMethod filter;
  FitResult result;
};

struct EstimationBlock {
  std::string name;
  /// True values of the identified parameters.
  std::map<std::string, double> truth;
  int observations;
  std::vector<BlockFit> fits;
};

/// VG-CAR(1) a = 1, b = 0.24, Gamma(1, 1); Euler step 0.01 subsampled to
/// spacing 1 over [0, 2000]; GL fit with n = 2, m = 4 and the Kalman filter.
EstimationBlock repro_car1_block(std::span<const std::uint64_t> seeds);

/// VG-CARMA(2,1) a = (1.35, 0.05), b = (0.2, 1), Gamma(1, 1); Euler step
/// 0.01 subsampled to spacing 0.5 over [0, 2000]; GL fit with n = 2, m = 8
/// for both the Brockwell and the Kalman filter.
EstimationBlock repro_carma21_block(std::span<const std::uint64_t> seeds);

/// Largest absolute deviation from the truth over the identified parameters.
double worst_deviation(const EstimationBlock& block, const BlockFit& fit);

/// VG-CARMA(2,1) a = (1.4, 0.5), b = (0.2, 1), Gamma(1, 1), S = 1, r = 0,
/// x0 = 0 with the library pricing defaults.
PricingSetup futures_reference_setup();

inline constexpr double kTermStructureMaturities[] = {1.0 / 12, 2.0 / 12, 3.0 / 12, 4.0 / 12};

/// Futures term structure at one to four months with 10,000 Monte Carlo
/// paths and Euler step T / 200.
std::vector<TermStructureRow> repro_term_structure(std::uint64_t seed = 1, int paths = 10000);

/// 20 strikes equally spaced on [0.5, 1.5].
std::vector<double> option_strike_grid();

struct OptionTable {
  double T0;
  double TF;
  std::vector<FuturesOptionQuote> laguerre;
  std::vector<McQuote> mc;
};

/// Calls on futures for (T0, TF) in {(1, 2), (2, 3), (3, 4)} months.
std::vector<OptionTable> repro_option_tables(std::uint64_t seed = 1, int paths = 10000,
                                             FuturesOptionRoute route = FuturesOptionRoute::conditional_forward);

/// ATM call under the exponential VG with theta = -0.5, sigma = 1, Gamma(1, 1),
/// S = 1, r = 0, T = 1: absolute error against the m = 150 price per order.
struct OrderError {
  int m;
  double price;
  double abs_error;
};

struct NvmmErrorStudy {
  double reference;
  std::vector<OrderError> rows;
  /// R^2 of the least-squares line through (m, log error).
  double log_linear_r2;
};

NvmmErrorStudy repro_nvmm_error_study(std::span<const int> orders);

}  // namespace lagcarma
