#include "lagcarma/variance_grid.hpp"

#include "lagcarma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lagcarma {

namespace {

int interval_count(double t0, double t, int n) {
  if (!(t > t0)) throw std::invalid_argument("build_grid: need t > t0");
  if (n < 0 || n > 30) throw std::invalid_argument("build_grid: dyadic resolution must be in [0, 30]");
  const double scaled = std::ldexp(t - t0, n);
  const auto count = static_cast<long long>(std::llround(scaled));
  if (count < 1) {
    std::ostringstream os;
    os << "build_grid: interval length " << (t - t0) << " is shorter than half a step 2^-" << n;
    throw std::invalid_argument(os.str());
  }
  return static_cast<int>(count);
}

DyadicGrid make_grid(const CarmaSpec& spec, double t0, double t, double kernel_end, int n) {
  spec.require_stationary("build_grid");
  DyadicGrid g;
  g.n = n;
  g.t0 = t0;
  g.t = t;
  g.kernel_end = kernel_end;
  g.intervals = interval_count(t0, t, n);
  g.step = std::ldexp(1.0, -n);
  std::vector<double> offsets(static_cast<std::size_t>(g.intervals));
  for (int k = 0; k < g.intervals; ++k) offsets[static_cast<std::size_t>(k)] = kernel_end - t0 - k * g.step;
  const auto kv = kernel_values(spec, offsets);
  g.coefficients.resize(kv.size());
  for (std::size_t k = 0; k < kv.size(); ++k) g.coefficients[k] = kv[k] * kv[k];
  return g;
}

struct Atom {
  double value;
  double prob;
};

// Sorts, merges clusters within relative tolerance, floors tiny masses.
void prune(std::vector<Atom>& atoms, const PruningSettings& s, PruningLog& log) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  if (s.merge_tol > 0.0 && atoms.size() > 1) {
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    std::size_t i = 0;
    while (i < atoms.size()) {
      const double start = atoms[i].value;
      double mass = 0.0;
      double moment = 0.0;
      std::size_t j = i;
      while (j < atoms.size() && atoms[j].value - start < s.merge_tol * std::abs(start)) {
        mass += atoms[j].prob;
        moment += atoms[j].prob * atoms[j].value;
        ++j;
      }
      if (j == i) {  // start == 0 with zero tolerance width
        mass = atoms[i].prob;
        moment = atoms[i].prob * atoms[i].value;
        j = i + 1;
      }
      log.atoms_merged += (j - i) - 1;
      merged.push_back({mass > 0.0 ? moment / mass : start, mass});
      i = j;
    }
    atoms.swap(merged);
  }
  if (s.mass_floor > 0.0) {
    double dropped = 0.0;
    std::erase_if(atoms, [&](const Atom& a) {
      if (a.prob < s.mass_floor) {
        dropped += a.prob;
        return true;
      }
      return false;
    });
    log.mass_dropped += dropped;
  }
  double total = 0.0;
  for (const auto& a : atoms) total += a.prob;
  if (!(total > 0.0)) throw ConstructionError("convolve_atoms: all mass was pruned");
  for (auto& a : atoms) a.prob /= total;
}

VarianceAtomSet from_atoms(std::vector<Atom>& atoms, AtomMode mode, PruningLog log) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<double> v(atoms.size());
  std::vector<double> p(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    v[i] = atoms[i].value;
    p[i] = atoms[i].prob;
  }
  return VarianceAtomSet(std::move(v), std::move(p), mode, log);
}

}  // namespace

DyadicGrid build_grid(const CarmaSpec& spec, double t0, double t, int n) {
  return make_grid(spec, t0, t, t, n);
}

DyadicGrid build_forward_grid(const CarmaSpec& spec, double t0, double t_option, double t_future,
                              int n) {
  if (!(t_future >= t_option)) {
    throw std::invalid_argument("build_forward_grid: futures maturity must not precede option expiry");
  }
  return make_grid(spec, t0, t_option, t_future, n);
}

DyadicGrid grid_from_coefficients(std::vector<double> coefficients, int n) {
  if (coefficients.empty()) throw std::invalid_argument("grid_from_coefficients: empty coefficients");
  DyadicGrid g;
  g.n = n;
  g.step = std::ldexp(1.0, -n);
  g.intervals = static_cast<int>(coefficients.size());
  g.t0 = 0.0;
  g.t = g.intervals * g.step;
  g.kernel_end = g.t;
  g.coefficients = std::move(coefficients);
  return g;
}

VarianceAtomSet::VarianceAtomSet(std::vector<double> atoms, std::vector<double> probabilities,
                                 AtomMode mode, PruningLog log)
    : atoms_(std::move(atoms)), probabilities_(std::move(probabilities)), mode_(mode), log_(log) {
  if (atoms_.empty() || atoms_.size() != probabilities_.size()) {
    throw ConstructionError("VarianceAtomSet: atoms and probabilities must be non-empty and aligned");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(atoms_[i] > 0.0) || !std::isfinite(atoms_[i])) {
      throw ConstructionError("VarianceAtomSet: atoms must be positive and finite");
    }
    if (!(probabilities_[i] >= 0.0)) throw ConstructionError("VarianceAtomSet: negative probability");
  }
}

VarianceAtomSet enumerate_atoms(const DyadicGrid& grid, const DiscreteMixing& increments,
                                std::size_t cap) {
  const std::size_t m = increments.size();
  const auto n_int = static_cast<std::size_t>(grid.intervals);
  std::size_t total = 1;
  for (std::size_t k = 0; k < n_int; ++k) {
    if (total > cap / m) {
      std::ostringstream os;
      os << "enumerate_atoms: " << m << "^" << n_int << " atoms exceed the cap of " << cap
         << "; use convolve_atoms (pruned mode)";
      throw CapacityError(os.str());
    }
    total *= m;
  }
  const auto u = increments.atoms();
  const auto pu = increments.probabilities();
  const auto& c = grid.coefficients;

  // Odometer over assignments (i_0, ..., i_{N-1}).
  std::vector<std::size_t> idx(n_int, 0);
  std::vector<Atom> atoms;
  atoms.reserve(total);
  for (std::size_t count = 0; count < total; ++count) {
    double v = 0.0;
    double p = 1.0;
    for (std::size_t k = 0; k < n_int; ++k) {
      v += c[k] * u[idx[k]];
      p *= pu[idx[k]];
    }
    atoms.push_back({v, p});
    for (std::size_t k = n_int; k-- > 0;) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
  }
  return from_atoms(atoms, AtomMode::exact, {});
}

VarianceAtomSet convolve_atoms(const DyadicGrid& grid, const DiscreteMixing& increments,
                               const PruningSettings& settings) {
  if (!(settings.merge_tol >= 0.0)) throw std::invalid_argument("convolve_atoms: merge_tol must be >= 0");
  if (!(settings.mass_floor >= 0.0 && settings.mass_floor <= 1e-6)) {
    throw std::invalid_argument("convolve_atoms: mass_floor must lie in [0, 1e-6]");
  }
  const auto u = increments.atoms();
  const auto pu = increments.probabilities();
  PruningLog log;
  std::vector<Atom> cur{{0.0, 1.0}};
  std::vector<Atom> next;
  for (double ck : grid.coefficients) {
    next.clear();
    next.reserve(cur.size() * u.size());
    for (const auto& a : cur) {
      for (std::size_t i = 0; i < u.size(); ++i) next.push_back({a.value + ck * u[i], a.prob * pu[i]});
    }
    prune(next, settings, log);
    cur.swap(next);
  }
  return from_atoms(cur, AtomMode::pruned, log);
}

double moments(const VarianceAtomSet& set, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("moments: order must be 1 or 2");
  const auto v = set.atoms();
  const auto p = set.probabilities();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += p[i] * (order == 1 ? v[i] : v[i] * v[i]);
  return s;
}

DiscreteMixing increment_mixing(const MixingLaw& unit_law, double step, int m) {
  return discretize(unit_law.at_horizon(step), m);
}

VarianceAtomSet build_variance_atoms(const DyadicGrid& grid, const MixingLaw& unit_law, int m,
                                     const PruningSettings& settings, std::size_t exact_limit) {
  const auto mix = increment_mixing(unit_law, grid.step, m);
  const double log_count = static_cast<double>(grid.intervals) * std::log(static_cast<double>(mix.size()));
  if (log_count <= std::log(static_cast<double>(exact_limit)) + 1e-12) {
    return enumerate_atoms(grid, mix, exact_limit);
  }
  return convolve_atoms(grid, mix, settings);
}

}  // namespace lagcarma
