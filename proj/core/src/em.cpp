#include "lagcarma/errors.hpp"
#include "lagcarma/estimation.hpp"
#include "lagcarma/quadrature.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lagcarma {

namespace {

// Standard-rule atoms k_i / phi_plus with masses w_i / k_i (k_i/phi)^lambda L(k_i/phi).
struct FixedNodes {
  std::vector<double> k;
  std::vector<double> log_w;
  double phi;
};

FixedNodes nodes_for(const MixingLaw& law, int m) {
  const auto form = law.slowly_varying_form();
  const auto rule = build_rule(m, 0.0);
  FixedNodes out;
  out.k.assign(rule.nodes().begin(), rule.nodes().end());
  out.log_w.assign(rule.log_weights().begin(), rule.log_weights().end());
  out.phi = form.phi_plus;
  return out;
}

std::vector<double> log_probabilities(const FixedNodes& nodes, const MixingLaw& law) {
  const auto form = law.slowly_varying_form();
  std::vector<double> lp(nodes.k.size());
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const double u = nodes.k[i] / nodes.phi;
    lp[i] = nodes.log_w[i] - std::log(nodes.k[i]) + form.lambda * std::log(u) + form.log_slowly_varying(u);
  }
  const double norm = log_sum_exp(lp);
  if (!std::isfinite(norm)) throw ConstructionError("em_fit_nvmm: mixing masses are not finite");
  for (auto& v : lp) v -= norm;
  return lp;
}

MixingLaw with_shape(const MixingLaw& law, double s) {
  if (const auto* g = std::get_if<GammaLaw>(&law.params())) return MixingLaw::gamma(s, g->rate);
  if (const auto* ig = std::get_if<InverseGaussianLaw>(&law.params())) return MixingLaw::inverse_gaussian(s, ig->b);
  throw std::invalid_argument("em_fit_nvmm: only Gamma and inverse Gaussian mixing laws are supported");
}

double shape_of(const MixingLaw& law) {
  if (const auto* g = std::get_if<GammaLaw>(&law.params())) return g->shape;
  if (const auto* ig = std::get_if<InverseGaussianLaw>(&law.params())) return ig->a;
  throw std::invalid_argument("em_fit_nvmm: only Gamma and inverse Gaussian mixing laws are supported");
}

// Observed log-likelihood; fills responsibilities when `resp` is given.
double e_step(std::span<const double> y, const NvmmParams& par, const FixedNodes& nodes,
              const std::vector<double>& log_p, std::vector<double>* resp) {
  const std::size_t m = nodes.k.size();
  std::vector<double> terms(m);
  double ll = 0.0;
  if (resp) resp->resize(y.size() * m);
  for (std::size_t t = 0; t < y.size(); ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      const double u = nodes.k[i] / nodes.phi;
      terms[i] = log_p[i] + normal_log_density(y[t], par.mu + par.theta * u, par.sigma * par.sigma * u);
    }
    const double lse = log_sum_exp(terms);
    ll += lse;
    if (resp)
      for (std::size_t i = 0; i < m; ++i) (*resp)[t * m + i] = std::exp(terms[i] - lse);
  }
  return ll;
}

}  // namespace

double nvmm_loglik(std::span<const double> data, const NvmmParams& params, const MixingLaw& law, int m) {
  if (!(params.sigma > 0.0)) throw std::invalid_argument("nvmm_loglik: sigma must be positive");
  const auto nodes = nodes_for(law, m);
  return e_step(data, params, nodes, log_probabilities(nodes, law), nullptr);
}

EmResult em_fit_nvmm(std::span<const double> y, int m, const EmInit& init, int max_iter, double tol) {
  if (y.size() < 2) throw std::invalid_argument("em_fit_nvmm: need at least two observations");
  if (m < 1) throw std::invalid_argument("em_fit_nvmm: order must be >= 1");
  if (!(init.nvmm.sigma > 0.0)) throw std::invalid_argument("em_fit_nvmm: initial sigma must be positive");
  (void)shape_of(init.law);  // rejects unsupported families
  const double n = static_cast<double>(y.size());
  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= n;
  double yvar = 0.0;
  for (double v : y) yvar += (v - ybar) * (v - ybar);
  yvar /= n;
  if (!(yvar > 0.0)) throw std::invalid_argument("em_fit_nvmm: data have zero variance");

  const auto nodes = nodes_for(init.law, m);
  const std::size_t mm = nodes.k.size();
  MixingLaw law = init.law;
  NvmmParams par = init.nvmm;
  auto log_p = log_probabilities(nodes, law);

  EmResult out{par, law, 0.0, 0, false, {}};
  if (m == 1) {
    // One atom: Gaussian MLE with the mixing drift held fixed.
    const double k1 = nodes.k[0];
    const double mu_t = par.theta / nodes.phi;
    par.mu = ybar - mu_t * k1;
    par.sigma = std::sqrt(yvar / k1 * nodes.phi);
    out.history.push_back(e_step(y, init.nvmm, nodes, log_p, nullptr));
    out.nvmm = par;
    out.loglik = e_step(y, par, nodes, log_p, nullptr);
    out.history.push_back(out.loglik);
    out.iterations = 1;
    out.converged = true;
    return out;
  }

  std::vector<double> resp;
  double ll = e_step(y, par, nodes, log_p, &resp);
  out.history.push_back(ll);
  for (int it = 1; it <= max_iter; ++it) {
    // H1: weighted regression of y on k with weights r / k.
    double s0 = 0, s1 = 0, s2 = 0, sy = 0, sky = 0;
    std::vector<double> mass(mm, 0.0);
    for (std::size_t t = 0; t < y.size(); ++t) {
      for (std::size_t i = 0; i < mm; ++i) {
        const double r = resp[t * mm + i];
        const double k = nodes.k[i];
        s0 += r / k;
        s1 += r;
        s2 += r * k;
        sy += r * y[t] / k;
        sky += r * y[t];
        mass[i] += r;
      }
    }
    const double det = s0 * s2 - s1 * s1;
    if (!(det > 1e-14 * s0 * s2)) throw std::runtime_error("em_fit_nvmm: singular M-step regression");
    const double mu0 = (s2 * sy - s1 * sky) / det;
    const double mu_t = (s0 * sky - s1 * sy) / det;
    double ss = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t)
      for (std::size_t i = 0; i < mm; ++i) {
        const double e = y[t] - mu0 - mu_t * nodes.k[i];
        ss += resp[t * mm + i] * e * e / nodes.k[i];
      }
    const double sig2_t = ss / n;
    par = {mu0, mu_t * nodes.phi, std::sqrt(sig2_t * nodes.phi)};

    // H2: shape parameter with phi_plus fixed; accepted only if it improves.
    auto h2 = [&](double log_s) {
      const auto lp = log_probabilities(nodes, with_shape(law, std::exp(log_s)));
      double v = 0.0;
      for (std::size_t i = 0; i < mm; ++i)
        if (mass[i] > 0.0) v += mass[i] * lp[i];
      return v;
    };
    const double cur = std::log(shape_of(law));
    const double h_cur = h2(cur);
    const auto [arg, neg] = boost::math::tools::brent_find_minima(
        [&](double z) {
          const double v = h2(z);
          return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
        },
        cur - 4.0, cur + 4.0, 40);
    if (-neg > h_cur) {
      law = with_shape(law, std::exp(arg));
      log_p = log_probabilities(nodes, law);
    }

    const double next = e_step(y, par, nodes, log_p, &resp);
    out.history.push_back(next);
    out.iterations = it;
    if (next < ll - 1e-8 * std::max(1.0, std::abs(ll))) {
      throw InternalError("em_fit_nvmm: observed log-likelihood decreased between iterations");
    }
    const bool done = next - ll < tol;
    ll = next;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.nvmm = par;
  out.law = law;
  out.loglik = ll;
  return out;
}

}  // namespace lagcarma
