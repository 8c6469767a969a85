#pragma once

#include <functional>
#include <vector>

namespace lagcarma {

struct NelderMeadOptions {
  int max_evaluations = 2000;
  /// Converged once the spread of simplex values and the simplex diameter
  /// (max coordinate offset from the best vertex) are both below these.
  double f_tolerance = 1e-8;
  double x_tolerance = 1e-6;
  /// Initial simplex offset per coordinate.
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  int evaluations;
  int iterations;
  bool converged;
};

/// Minimizes f. Non-finite values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace lagcarma
