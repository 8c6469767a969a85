#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/mixing.hpp"
#include "lagcarma/timeseries.hpp"
#include "lagcarma/variance_grid.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace lagcarma {

/// Conditional law of Y_t given X_{t0}: a Gaussian mixture sharing the mean
/// b' e^{A(t-t0)} x0 with variances from the atom set.
struct TransitionLaw {
  double mean;
  VarianceAtomSet atoms;
  double t0;
  double t;
  int n;
  int m;

  double log_density(double y) const;
  double density(double y) const;
  /// E[e^{cY}] of the mixture.
  double mgf(double c) const;
};

struct AtomBuildOptions {
  PruningSettings pruning{};
  /// Exact enumeration when N <= this and m^N <= exact_atom_limit.
  int exact_max_intervals = 12;
  std::size_t exact_atom_limit = std::size_t{1} << 16;
};

/// Exact enumeration or pruned convolution for a prebuilt grid.
VarianceAtomSet atoms_for_grid(const DyadicGrid& grid, const MixingLaw& law, int m,
                               const AtomBuildOptions& options = {});

VarianceAtomSet variance_atoms(const CarmaSpec& spec, const MixingLaw& law, double t0, double t,
                               int n, int m, const AtomBuildOptions& options = {});

TransitionLaw transition_law(const CarmaSpec& spec, const Eigen::VectorXd& x0, const MixingLaw& law,
                             double t0, double t, int n, int m, const AtomBuildOptions& options = {});

double transition_density(const CarmaSpec& spec, const Eigen::VectorXd& x0, const MixingLaw& law,
                          double t0, double t, int n, int m, double y);

struct LogLikelihood {
  double value;
  /// Terms whose density underflowed and were floored at the smallest normal double.
  int floored_terms;
};

/// Sum over i >= 1 of log f(y_i | x_{i-1}); states[i-1] is the state at
/// observations[i-1].t, so states.size() == observations.size() - 1.
/// Terms with index i <= skip_initial are left out (filter warm-up).
LogLikelihood log_likelihood(const CarmaSpec& spec, const MixingLaw& law,
                             std::span<const Eigen::VectorXd> states,
                             std::span<const Observation> observations, int n, int m,
                             const AtomBuildOptions& options = {}, int skip_initial = 0);

}  // namespace lagcarma
