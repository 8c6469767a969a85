#include "lagcarma/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lagcarma {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& o) {
  const std::size_t d = x0.size();
  if (d == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(d + 1, x0);
  std::vector<double> vals(d + 1);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += o.initial_step;
  for (std::size_t i = 0; i <= d; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(d + 1);
  int iterations = 0;
  bool converged = false;
  while (evals < o.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    {
      std::vector<std::vector<double>> p2(d + 1);
      std::vector<double> v2(d + 1);
      for (std::size_t i = 0; i <= d; ++i) {
        p2[i] = pts[order[i]];
        v2[i] = vals[order[i]];
      }
      pts.swap(p2);
      vals.swap(v2);
    }
    double diameter = 0.0;
    for (std::size_t i = 1; i <= d; ++i)
      for (std::size_t j = 0; j < d; ++j) diameter = std::max(diameter, std::abs(pts[i][j] - pts[0][j]));
    if (std::isfinite(vals[d]) && vals[d] - vals[0] <= o.f_tolerance && diameter <= o.x_tolerance) {
      converged = true;
      break;
    }
    ++iterations;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += pts[i][j] / static_cast<double>(d);
    auto along = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + t * (pts[d][j] - centroid[j]);
      return x;
    };
    auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[d] = std::move(xe);
        vals[d] = fe;
      } else {
        pts[d] = std::move(xr);
        vals[d] = fr;
      }
      continue;
    }
    if (fr < vals[d - 1]) {
      pts[d] = std::move(xr);
      vals[d] = fr;
      continue;
    }
    const bool outside = fr < vals[d];
    auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[d])) {
      pts[d] = std::move(xc);
      vals[d] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t j = 0; j < d; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], evals, iterations, converged};
}

}  // namespace lagcarma
