#include "lagcarma/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace lagcarma {

namespace {

constexpr double kZ95 = 1.6448536269514722;

// Michael-Schucany-Haas draw from IG with mean mu and shape lambda.
double draw_inverse_gaussian(double mu, double lambda, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const double nu = normal(rng);
  const double y = nu * nu;
  const double x = mu + mu * mu * y / (2.0 * lambda) -
                   mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
  if (uniform(rng) <= mu / (mu + x)) return x;
  return mu * mu / x;
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double draw_increment(const MixingLaw& law, double dt, std::mt19937_64& rng) {
  const auto& params = law.params();
  if (const auto* g = std::get_if<GammaLaw>(&params)) {
    std::gamma_distribution<double> dist(g->shape * dt, 1.0 / g->rate);
    return dist(rng);
  }
  if (const auto* ig = std::get_if<InverseGaussianLaw>(&params)) {
    const double a = ig->a * dt;
    return draw_inverse_gaussian(a / ig->b, a * a, rng);
  }
  if (const auto* d = std::get_if<DegenerateLaw>(&params)) return d->value * dt;
  throw std::invalid_argument("simulate_subordinator: GIG subordinator paths are not supported");
}

std::vector<double> simulate_subordinator(const MixingLaw& law, double dt, int steps,
                                          std::uint64_t seed, std::uint64_t stream) {
  if (!(dt > 0.0) || steps < 0) throw std::invalid_argument("simulate_subordinator: need dt > 0 and steps >= 0");
  if (law.family() == LawFamily::gig) {
    throw std::invalid_argument("simulate_subordinator: GIG subordinator paths are not supported");
  }
  auto rng = make_stream(seed, stream);
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (auto& v : out) v = draw_increment(law, dt, rng);
  return out;
}

PathSet simulate_tcbm_carma(const CarmaSpec& spec, const MixingLaw& law, double T, double dt,
                            int n_paths, std::uint64_t seed, const Eigen::VectorXd& x0,
                            bool keep_paths) {
  spec.require_stationary("simulate_tcbm_carma");
  if (!(dt > 0.0) || !(T > 0.0) || n_paths < 1) {
    throw std::invalid_argument("simulate_tcbm_carma: need T > 0, dt > 0 and n_paths >= 1");
  }
  if (x0.size() != spec.p()) throw std::invalid_argument("simulate_tcbm_carma: state dimension mismatch");
  if (law.family() == LawFamily::gig) {
    throw std::invalid_argument("simulate_tcbm_carma: GIG subordinator paths are not supported");
  }
  const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  PathSet out;
  out.seed = seed;
  out.dt = dt;
  out.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) out.times[static_cast<std::size_t>(i)] = std::min(i * dt, T);
  out.times.back() = T;
  if (keep_paths) out.paths.resize(static_cast<std::size_t>(n_paths));
  out.terminal_states.resize(static_cast<std::size_t>(n_paths));
  out.terminal_values.resize(static_cast<std::size_t>(n_paths));

  const Eigen::MatrixXd& a = spec.companion();
  const Eigen::VectorXd& b = spec.b_vec();
  const int p = spec.p();
  for (int k = 0; k < n_paths; ++k) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal;
    Eigen::VectorXd x = x0;
    std::vector<double> path;
    if (keep_paths) {
      path.reserve(out.times.size());
      path.push_back(b.dot(x));
    }
    for (int i = 0; i < steps; ++i) {
      const double h = out.times[static_cast<std::size_t>(i) + 1] - out.times[static_cast<std::size_t>(i)];
      const double dl = draw_increment(law, h, rng);
      const double z = normal(rng);
      Eigen::VectorXd drift = a * x * h;
      x += drift;
      x(p - 1) += std::sqrt(dl) * z;
      if (keep_paths) path.push_back(b.dot(x));
    }
    if (keep_paths) out.paths[static_cast<std::size_t>(k)] = std::move(path);
    out.terminal_values[static_cast<std::size_t>(k)] = b.dot(x);
    out.terminal_states[static_cast<std::size_t>(k)] = x;
  }
  return out;
}

std::vector<std::pair<double, double>> simulate_observations(const CarmaSpec& spec,
                                                             const MixingLaw& law, double T,
                                                             double dt, int subsample,
                                                             std::uint64_t seed,
                                                             const Eigen::VectorXd& x0) {
  if (subsample < 1) throw std::invalid_argument("simulate_observations: subsample must be >= 1");
  const auto set = simulate_tcbm_carma(spec, law, T, dt, 1, seed, x0, true);
  std::vector<std::pair<double, double>> out;
  const auto& path = set.paths.front();
  for (std::size_t i = 0; i < path.size(); i += static_cast<std::size_t>(subsample)) {
    out.emplace_back(set.times[i], path[i]);
  }
  return out;
}

std::vector<double> simulate_nvmm(const NvmmParams& params, const MixingLaw& law, int count,
                                  std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("simulate_nvmm: count must be >= 1");
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& y : out) {
    const double l = draw_increment(law, 1.0, rng);
    y = params.mu + params.theta * l + params.sigma * std::sqrt(l) * normal(rng);
  }
  return out;
}

McEstimate mc_summary(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("mc_summary: no samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double se = sd / std::sqrt(n);
  return {mean, mean - kZ95 * se, mean + kZ95 * se, se, static_cast<int>(samples.size())};
}

McEstimate mc_price(const std::function<double(double)>& payoff, const PathSet& paths,
                    double discount) {
  std::vector<double> values;
  values.reserve(paths.terminal_values.size());
  for (double y : paths.terminal_values) values.push_back(discount * payoff(y));
  return mc_summary(values);
}

}  // namespace lagcarma
