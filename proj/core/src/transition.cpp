#include "lagcarma/transition.hpp"

#include "lagcarma/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace lagcarma {

namespace {

bool use_exact(const DyadicGrid& grid, int m_eff, const AtomBuildOptions& o) {
  if (grid.intervals > o.exact_max_intervals) return false;
  const double log_count = grid.intervals * std::log(static_cast<double>(m_eff));
  return log_count <= std::log(static_cast<double>(o.exact_atom_limit)) + 1e-12;
}

}  // namespace

double TransitionLaw::log_density(double y) const {
  const auto v = atoms.atoms();
  const auto p = atoms.probabilities();
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) terms[i] = std::log(p[i]) + normal_log_density(y, mean, v[i]);
  return log_sum_exp(terms);
}

double TransitionLaw::density(double y) const { return std::exp(log_density(y)); }

double TransitionLaw::mgf(double c) const {
  const auto v = atoms.atoms();
  const auto p = atoms.probabilities();
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) terms[i] = std::log(p[i]) + 0.5 * c * c * v[i];
  return std::exp(c * mean + log_sum_exp(terms));
}

VarianceAtomSet variance_atoms(const CarmaSpec& spec, const MixingLaw& law, double t0, double t,
                               int n, int m, const AtomBuildOptions& options) {
  return atoms_for_grid(build_grid(spec, t0, t, n), law, m, options);
}

VarianceAtomSet atoms_for_grid(const DyadicGrid& grid, const MixingLaw& law, int m,
                               const AtomBuildOptions& options) {
  const auto mix = increment_mixing(law, grid.step, m);
  if (use_exact(grid, static_cast<int>(mix.size()), options)) {
    return enumerate_atoms(grid, mix, options.exact_atom_limit);
  }
  return convolve_atoms(grid, mix, options.pruning);
}

TransitionLaw transition_law(const CarmaSpec& spec, const Eigen::VectorXd& x0, const MixingLaw& law,
                             double t0, double t, int n, int m, const AtomBuildOptions& options) {
  spec.require_stationary("transition_law");
  if (x0.size() != spec.p()) throw std::invalid_argument("transition_law: state dimension mismatch");
  const double mean = conditional_moments(spec, x0, t - t0).mean;
  return TransitionLaw{mean, variance_atoms(spec, law, t0, t, n, m, options), t0, t, n, m};
}

double transition_density(const CarmaSpec& spec, const Eigen::VectorXd& x0, const MixingLaw& law,
                          double t0, double t, int n, int m, double y) {
  return transition_law(spec, x0, law, t0, t, n, m).density(y);
}

LogLikelihood log_likelihood(const CarmaSpec& spec, const MixingLaw& law,
                             std::span<const Eigen::VectorXd> states,
                             std::span<const Observation> observations, int n, int m,
                             const AtomBuildOptions& options, int skip_initial) {
  if (observations.size() < 2) throw std::invalid_argument("log_likelihood: need at least two observations");
  if (states.size() + 1 != observations.size()) {
    throw std::invalid_argument("log_likelihood: expected one state per observation transition");
  }
  require_increasing_times(observations, "log_likelihood");
  spec.require_stationary("log_likelihood");

  // Atom sets depend on the time step only (the grid starts at t0 = 0 w.l.o.g.).
  // Each cached set stores log P_k - log(2 pi V_k) / 2 and 1 / (2 V_k).
  struct Prepared {
    std::vector<double> offset;
    std::vector<double> inv_two_var;
  };
  std::map<long long, Prepared> cache;
  std::map<long long, Eigen::RowVectorXd> propagators;
  const double log_floor = std::log(std::numeric_limits<double>::min());
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  LogLikelihood out{0.0, 0};
  std::vector<double> terms;
  for (std::size_t i = 1; i < observations.size(); ++i) {
    if (static_cast<int>(i) <= skip_initial) continue;
    const double dt = observations[i].t - observations[i - 1].t;
    const long long key = std::llround(std::ldexp(dt, n));
    auto it = cache.find(key);
    if (it == cache.end()) {
      const auto set = variance_atoms(spec, law, 0.0, dt, n, m, options);
      Prepared prep;
      for (std::size_t k = 0; k < set.size(); ++k) {
        const double v = set.atoms()[k];
        prep.offset.push_back(std::log(set.probabilities()[k]) - half_log_two_pi - 0.5 * std::log(v));
        prep.inv_two_var.push_back(0.5 / v);
      }
      it = cache.emplace(key, std::move(prep)).first;
    }
    const long long dt_key = std::llround(dt * 1e12);
    auto prop = propagators.find(dt_key);
    if (prop == propagators.end()) {
      const Eigen::RowVectorXd row = spec.b_vec().transpose() * matrix_exponential(spec.companion(), dt);
      prop = propagators.emplace(dt_key, row).first;
    }
    const Eigen::VectorXd& x = states[i - 1];
    if (x.size() != spec.p()) throw std::invalid_argument("log_likelihood: state dimension mismatch");
    const double r = observations[i].y - prop->second.dot(x);
    const double r2 = r * r;
    const auto& prep = it->second;
    terms.resize(prep.offset.size());
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = prep.offset[k] - r2 * prep.inv_two_var[k];
    double term = log_sum_exp(terms);
    if (!(term >= log_floor)) {
      term = log_floor;
      ++out.floored_terms;
    }
    out.value += term;
  }
  return out;
}

}  // namespace lagcarma
