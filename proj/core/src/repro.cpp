#include "lagcarma/repro.hpp"

#include "lagcarma/simulation.hpp"
#include "lagcarma/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagcarma {

namespace {

TimeSeries simulate_series(const CarmaSpec& spec, const MixingLaw& law, double horizon, double spacing,
                           std::uint64_t seed) {
  constexpr double kEulerStep = 0.01;
  const int subsample = static_cast<int>(std::lround(spacing / kEulerStep));
  TimeSeries data;
  for (auto [t, y] : simulate_observations(spec, law, horizon, kEulerStep, subsample, seed,
                                           Eigen::VectorXd::Zero(spec.p()))) {
    data.push_back({t, y});
  }
  return data;
}

}  // namespace

MgfStudy repro_ou_mgf() {
  const CarmaSpec spec({0.25}, {1.0});
  const auto law = MixingLaw::gamma(1.0, 1.0);
  constexpr double kHorizon = 0.25;
  AtomBuildOptions options;
  options.exact_max_intervals = 16;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const auto tl = transition_law(spec, x0, law, 0.0, kHorizon, 6, 2, options);
  MgfStudy study{tl.atoms.size(), tl.atoms.mode(), {}};
  for (int i = 0; i <= 10; ++i) {
    const double c = -1.0 + 0.2 * i;
    const double mixture = tl.mgf(c);
    const double log_closed =
        c * tl.mean + cumulant_of_integral([&](double u) { return law.cumulant(u); },
                                           [&](double s) {
                                             const double g = kernel(spec, s);
                                             return 0.5 * c * c * g * g;
                                           },
                                           kHorizon);
    const double closed = std::exp(log_closed);
    study.rows.push_back({c, mixture, closed, std::abs(mixture / closed - 1.0)});
  }
  return study;
}

EstimationBlock repro_car1_block(std::span<const std::uint64_t> seeds) {
  const CarmaSpec truth({1.0}, {0.24});
  const auto law = MixingLaw::gamma(1.0, 1.0);
  EstimationBlock block{"vg-car1", {{"a1", 1.0}, {"b0", 0.24}, {"shape", 1.0}}, 0, {}};
  for (auto seed : seeds) {
    const auto data = simulate_series(truth, law, 2000.0, 1.0, seed);
    block.observations = static_cast<int>(data.size());
    FitConfig config;
    config.n = 2;
    config.m = 4;
    config.filter = FilterMethod::kalman;
    block.fits.push_back({seed, config.filter, fit_tcbm_carma(data, 1, 0, LawFamily::gamma, config)});
  }
  return block;
}

EstimationBlock repro_carma21_block(std::span<const std::uint64_t> seeds) {
  const CarmaSpec truth({1.35, 0.05}, {0.2, 1.0});
  const auto law = MixingLaw::gamma(1.0, 1.0);
  EstimationBlock block{"vg-carma21",
                        {{"a1", 1.35}, {"a2", 0.05}, {"b0", 0.2}, {"b1", 1.0}, {"shape", 1.0}},
                        0,
                        {}};
  for (auto seed : seeds) {
    const auto data = simulate_series(truth, law, 2000.0, 0.5, seed);
    block.observations = static_cast<int>(data.size());
    for (auto filter : {FilterMethod::brockwell, FilterMethod::kalman}) {
      FitConfig config;
      config.n = 2;
      config.m = 8;
      config.filter = filter;
      block.fits.push_back({seed, filter, fit_tcbm_carma(data, 2, 1, LawFamily::gamma, config)});
    }
  }
  return block;
}

double worst_deviation(const EstimationBlock& block, const BlockFit& fit) {
  double worst = 0.0;
  for (const auto& [name, value] : block.truth) {
    const auto it = fit.result.estimates.find(name);
    if (it == fit.result.estimates.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(it->second - value));
  }
  return worst;
}

PricingSetup futures_reference_setup() {
  return PricingSetup(CarmaSpec({1.4, 0.5}, {0.2, 1.0}), MixingLaw::gamma(1.0, 1.0));
}

std::vector<TermStructureRow> repro_term_structure(std::uint64_t seed, int paths) {
  return term_structure(futures_reference_setup(), kTermStructureMaturities, paths, seed);
}

std::vector<double> option_strike_grid() {
  std::vector<double> strikes;
  for (int i = 0; i < 20; ++i) strikes.push_back(0.5 + i / 19.0);
  return strikes;
}

std::vector<OptionTable> repro_option_tables(std::uint64_t seed, int paths, FuturesOptionRoute route) {
  const auto setup = futures_reference_setup();
  const auto strikes = option_strike_grid();
  std::vector<OptionTable> tables;
  for (int month = 1; month <= 3; ++month) {
    const double T0 = month / 12.0;
    const double TF = (month + 1) / 12.0;
    tables.push_back({T0, TF, futures_option_strip(setup, T0, TF, strikes, route),
                      mc_futures_option_calls(setup, T0, TF, strikes, paths, seed)});
  }
  return tables;
}

NvmmErrorStudy repro_nvmm_error_study(std::span<const int> orders) {
  const NvmmPricingSetup setup{MixingLaw::gamma(1.0, 1.0), -0.5, 1.0, 1.0, 0.0};
  NvmmErrorStudy study{nvmm_european_price(setup, OptionKind::call, 1.0, 1.0, 150), {}, 0.0};
  for (int m : orders) {
    const double price = nvmm_european_price(setup, OptionKind::call, 1.0, 1.0, m);
    study.rows.push_back({m, price, std::abs(price - study.reference)});
  }
  const double k = static_cast<double>(study.rows.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& row : study.rows) {
    const double x = row.m;
    const double y = std::log(row.abs_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / k;
  const double vx = sxx - sx * sx / k;
  const double vy = syy - sy * sy / k;
  study.log_linear_r2 = (vx > 0.0 && vy > 0.0) ? cov * cov / (vx * vy) : 0.0;
  return study;
}

}  // namespace lagcarma
