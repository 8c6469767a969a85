#pragma once

#include "lagcarma/carma.hpp"
#include "lagcarma/mixing.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace lagcarma {

/// Left Riemann grid of spacing 2^{-n} over [t0, t). Coefficient k is the
/// squared kernel at offset (kernel_end - t0 - k 2^{-n}); kernel_end = t for
/// the spot variance and the futures maturity for the forward variance.
struct DyadicGrid {
  int n = 0;
  double t0 = 0.0;
  double t = 0.0;
  double kernel_end = 0.0;
  int intervals = 0;
  double step = 0.0;
  std::vector<double> coefficients;
};

/// Number of subintervals round(2^n (t - t0)). Throws if it rounds to zero.
DyadicGrid build_grid(const CarmaSpec& spec, double t0, double t, int n);

/// Forward-variance grid: the time grid spans [t0, t_option] while the kernel
/// is evaluated at t_future - t0 - k 2^{-n}.
DyadicGrid build_forward_grid(const CarmaSpec& spec, double t0, double t_option, double t_future,
                              int n);

/// Grid built from explicit coefficients (tests and diagnostics).
DyadicGrid grid_from_coefficients(std::vector<double> coefficients, int n);

enum class AtomMode { exact, pruned };

struct PruningLog {
  double mass_dropped = 0.0;
  std::size_t atoms_merged = 0;
};

struct PruningSettings {
  /// Atoms whose relative distance to the start of their cluster is below
  /// this are merged (probability-weighted mean). 0 disables merging.
  double merge_tol = 1e-8;
  /// Atoms lighter than this are dropped and the rest renormalized. Must lie in [0, 1e-6].
  double mass_floor = 1e-14;
};

/// Discrete law of V(n, m): atoms sorted ascending, probabilities summing to 1.
class VarianceAtomSet {
 public:
  VarianceAtomSet(std::vector<double> atoms, std::vector<double> probabilities, AtomMode mode,
                  PruningLog log = {});

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  AtomMode mode() const noexcept { return mode_; }
  const PruningLog& pruning_log() const noexcept { return log_; }

 private:
  std::vector<double> atoms_;
  std::vector<double> probabilities_;
  AtomMode mode_;
  PruningLog log_;
};

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 24;

/// One atom per assignment of mixing atoms to subintervals (m^N atoms).
/// Throws CapacityError when m^N exceeds `cap`.
VarianceAtomSet enumerate_atoms(const DyadicGrid& grid, const DiscreteMixing& increments,
                                std::size_t cap = kDefaultEnumerationCap);

/// Iterated convolution of the N scaled increment laws with merging and mass
/// flooring after each step.
VarianceAtomSet convolve_atoms(const DyadicGrid& grid, const DiscreteMixing& increments,
                               const PruningSettings& settings = {});

/// sum p_i v_i^order for order 1 or 2.
double moments(const VarianceAtomSet& set, int order);

/// Discretized law of one subordinator increment over a grid step.
DiscreteMixing increment_mixing(const MixingLaw& unit_law, double step, int m);

/// Builds the increment mixing and the atom set; exact enumeration when
/// m^N <= exact_limit, pruned convolution otherwise.
VarianceAtomSet build_variance_atoms(const DyadicGrid& grid, const MixingLaw& unit_law, int m,
                                     const PruningSettings& settings = {},
                                     std::size_t exact_limit = 4096);

}  // namespace lagcarma
