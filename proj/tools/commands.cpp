#include "commands.hpp"

#include "lagcarma/errors.hpp"
#include "lagcarma/estimation.hpp"
#include "lagcarma/model_file.hpp"
#include "lagcarma/pricing.hpp"
#include "lagcarma/quadrature.hpp"
#include "lagcarma/repro.hpp"
#include "lagcarma/simulation.hpp"
#include "lagcarma/state_filter.hpp"
#include "lagcarma/timeseries.hpp"
#include "lagcarma/transition.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace lagcarma::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void progress(const RunConfig& run, const std::string& text) {
  if (run.verbosity > 0) std::cerr << text << '\n';
}

Command leaf(CLI::App* app, Action action) { return {app, std::move(action)}; }

// Numbers in key = value reports.
std::string num(double v, int digits = kMachineDigits) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

PricingSetup pricing_setup(const ModelFile& model, int n, int m, double merge_tol) {
  PricingSetup setup(model.spec, model.law, model.x0);
  setup.spot = model.spot;
  setup.rate = model.rate;
  setup.t0 = model.t0;
  setup.n = n;
  setup.m = m;
  setup.atoms.pruning.merge_tol = merge_tol;
  return setup;
}

FuturesOptionRoute parse_route(const std::string& name) {
  if (name == "conditional") return FuturesOptionRoute::conditional_forward;
  if (name == "fixed") return FuturesOptionRoute::fixed_forward;
  throw UsageError("--route", "expected conditional or fixed, got '" + name + "'");
}

// Density of the NVMM integrated against the exact mixing law.
double nvmm_reference_density(const NvmmParams& par, const MixingLaw& law, double y) {
  if (const auto* d = std::get_if<DegenerateLaw>(&law.params())) {
    return std::exp(normal_log_density(y, par.mu + par.theta * d->value, par.sigma * par.sigma * d->value));
  }
  const auto f = [&](double u) {
    if (!(u > 0.0)) return 0.0;
    const double log_f = law.log_density(u) + normal_log_density(y, par.mu + par.theta * u, par.sigma * par.sigma * u);
    return std::isfinite(log_f) ? std::exp(log_f) : 0.0;
  };
  boost::math::quadrature::tanh_sinh<double> head;
  boost::math::quadrature::exp_sinh<double> tail;
  return head.integrate(f, 0.0, 1.0) + tail.integrate(f, 1.0, std::numeric_limits<double>::infinity());
}

// Law parameters under the names used by the estimators.
std::vector<std::pair<std::string, double>> law_values(const MixingLaw& law) {
  return std::visit(
      [](const auto& p) -> std::vector<std::pair<std::string, double>> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GammaLaw>) return {{"shape", p.shape}, {"rate", p.rate}};
        if constexpr (std::is_same_v<T, InverseGaussianLaw>) return {{"ig_a", p.a}, {"ig_b", p.b}};
        if constexpr (std::is_same_v<T, GigLaw>) return {{"gig_a", p.a}, {"gig_b", p.b}, {"gig_p", p.p}};
        if constexpr (std::is_same_v<T, DegenerateLaw>) return {{"level", p.value}};
      },
      law.params());
}

// ---------------------------------------------------------------- quadrature

Command add_quadrature(CLI::App& app) {
  struct Flags {
    int order = 0;
    double alpha = 0.0;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = app.add_subcommand("quadrature", "Gauss-Laguerre nodes and weights as node,weight rows");
  sub->add_option("--order", f->order, "Number of nodes")->required()->check(CLI::Range(1, 180));
  sub->add_option("--alpha", f->alpha, "Generalized weight exponent, x^alpha e^-x")->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto rule = build_rule(f->order, f->alpha);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    csv.header({"node", "weight"});
    for (int i = 0; i < rule.order(); ++i) csv.row({rule.nodes()[i], rule.weights()[i]});
  });
}

// ---------------------------------------------------------------------- nvmm

Command add_nvmm_mgf(CLI::App* nvmm) {
  struct Flags {
    LawFlags law;
    int order = 0;
    std::string grid = "-2:0.75:0.25";
  };
  auto f = std::make_shared<Flags>();
  auto* sub = nvmm->add_subcommand("mgf", "Analytic against approximated MGF of the mixing law");
  f->law.attach(sub);
  sub->add_option("--order", f->order, "Laguerre order m")->required()->check(CLI::Range(1, 180));
  sub->add_option("--c-grid", f->grid, "LO:HI:STEP")->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto law = f->law.build();
    const auto cs = parse_step_grid(f->grid, "--c-grid");
    const auto mix = discretize(law, f->order);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    csv.header({"c", "analytic", "approx", "abs_error"});
    for (double c : cs) {
      double exact = kNaN;
      try {
        exact = analytic_mgf(law, c);
      } catch (const DomainError&) {
      }
      const double approx = approx_mgf(mix, c);
      csv.row({c, exact, approx, std::abs(approx - exact)});
    }
  });
}

Command add_nvmm_density(CLI::App* nvmm) {
  struct Flags {
    LawFlags law;
    int order = 0;
    double mu = 0.0, theta = 0.0, sigma = 1.0;
    std::string grid = "-3:3:0.5";
  };
  auto f = std::make_shared<Flags>();
  auto* sub = nvmm->add_subcommand("density", "Exact against m-atom NVMM density on a y-grid");
  f->law.attach(sub);
  sub->add_option("--order", f->order, "Laguerre order m")->required()->check(CLI::Range(1, 180));
  sub->add_option("--mu", f->mu)->capture_default_str();
  sub->add_option("--theta", f->theta)->capture_default_str();
  sub->add_option("--sigma", f->sigma)->capture_default_str();
  sub->add_option("--y-grid", f->grid, "LO:HI:STEP")->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    if (!(f->sigma > 0.0)) throw UsageError("--sigma", "must be positive");
    const auto law = f->law.build();
    const auto ys = parse_step_grid(f->grid, "--y-grid");
    const NvmmParams par{f->mu, f->theta, f->sigma};
    const auto mix = discretize(law, f->order);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    csv.header({"y", "analytic", "approx", "abs_error"});
    for (double y : ys) {
      const double exact = nvmm_reference_density(par, law, y);
      const double approx = nvmm_density(par, mix, y);
      csv.row({y, exact, approx, std::abs(approx - exact)});
    }
  });
}

Command add_nvmm_em(CLI::App* nvmm) {
  struct Flags {
    LawFlags law;
    std::string data;
    int order = 20;
    double mu = 0.0, theta = 0.0, sigma = 1.0;
    int max_iter = 500;
    double tol = 1e-8;
    bool history = false;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = nvmm->add_subcommand("em", "EM fit of the m-atom NVMM to the y column of a t,y file");
  f->law.attach(sub);
  sub->add_option("--data", f->data, "t,y CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--order", f->order, "Laguerre order m")->capture_default_str()->check(CLI::Range(1, 180));
  sub->add_option("--mu", f->mu, "Initial mu")->capture_default_str();
  sub->add_option("--theta", f->theta, "Initial theta")->capture_default_str();
  sub->add_option("--sigma", f->sigma, "Initial sigma")->capture_default_str();
  sub->add_option("--max-iter", f->max_iter)->capture_default_str();
  sub->add_option("--tol", f->tol)->capture_default_str();
  sub->add_flag("--history", f->history, "Append the per-iteration log-likelihood");
  return leaf(sub, [f](const RunConfig& run) {
    const auto series = load_timeseries(f->data);
    std::vector<double> y;
    for (const auto& o : series) y.push_back(o.y);
    const auto fit = em_fit_nvmm(y, f->order, EmInit{{f->mu, f->theta, f->sigma}, f->law.build()}, f->max_iter, f->tol);
    Sink sink(run.output);
    auto& os = sink.stream();
    os << "method = em-nvmm\norder = " << f->order << "\nobservations = " << y.size() << "\nmu = " << num(fit.nvmm.mu)
       << "\ntheta = " << num(fit.nvmm.theta) << "\nsigma = " << num(fit.nvmm.sigma) << '\n';
    for (const auto& [k, v] : law_values(fit.law)) os << k << " = " << num(v) << '\n';
    os << "loglik = " << num(fit.loglik) << "\niterations = " << fit.iterations
       << "\nconverged = " << (fit.converged ? "true" : "false") << '\n';
    if (f->history) {
      os << '\n';
      CsvWriter csv(os, kMachineDigits);
      csv.header({"iteration", "loglik"});
      for (std::size_t i = 0; i < fit.history.size(); ++i) csv.row({static_cast<double>(i), fit.history[i]});
    }
  });
}

Command add_nvmm_price(CLI::App* nvmm) {
  struct Flags {
    LawFlags law;
    double theta = 0.0, sigma = 1.0, spot = 1.0, rate = 0.0, T = 1.0;
    std::string strikes = "1:1:1";
    std::string kind = "call";
    int order = 40;
    int mc_paths = 0;
    std::uint64_t seed = 1;
    int digits = kTableDigits;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = nvmm->add_subcommand("price", "European options under the exponential NVMM");
  f->law.attach(sub);
  sub->add_option("--theta", f->theta)->capture_default_str();
  sub->add_option("--sigma", f->sigma)->capture_default_str();
  sub->add_option("--spot", f->spot)->capture_default_str();
  sub->add_option("--interest", f->rate, "Risk-free rate")->capture_default_str();
  sub->add_option("--T", f->T, "Maturity")->capture_default_str();
  sub->add_option("--strikes", f->strikes, "LO:HI:COUNT")->capture_default_str();
  sub->add_option("--kind", f->kind, "call or put")->capture_default_str();
  sub->add_option("--order", f->order, "Laguerre order m")->capture_default_str()->check(CLI::Range(1, 180));
  sub->add_option("--mc-paths", f->mc_paths, "Monte Carlo paths (0 disables)")->capture_default_str();
  sub->add_option("--seed", f->seed)->capture_default_str();
  sub->add_option("--digits", f->digits, "Significant digits")->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    if (f->kind != "call" && f->kind != "put") throw UsageError("--kind", "expected call or put");
    const auto kind = f->kind == "call" ? OptionKind::call : OptionKind::put;
    const NvmmPricingSetup setup{f->law.build(), f->theta, f->sigma, f->spot, f->rate};
    const auto strikes = parse_count_grid(f->strikes, "--strikes");
    const auto mix = discretize(setup.unit_law.at_horizon(f->T), f->order);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), f->digits);
    if (f->mc_paths > 0) csv.header({"K", "GaussL", "MC", "UB", "LB"});
    else csv.header({"K", "GaussL"});
    for (double k : strikes) {
      const double price = nvmm_european_price(setup, kind, k, f->T, mix);
      if (f->mc_paths > 0) {
        const auto mc = mc_nvmm_price(setup, kind, k, f->T, f->mc_paths, f->seed);
        csv.row({k, price, mc.mid, mc.upper, mc.lower});
      } else {
        csv.row({k, price});
      }
    }
  });
}

// ------------------------------------------------------------ variance atoms

Command add_variance_atoms(CLI::App& app) {
  struct Flags {
    std::string model;
    double t = 0.0;
    int n = 2, m = 2;
    double merge_tol = PruningSettings{}.merge_tol;
    double mass_floor = PruningSettings{}.mass_floor;
    int exact_max_intervals = AtomBuildOptions{}.exact_max_intervals;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = app.add_subcommand("variance-atoms", "Discretized integrated variance over [t0, t]");
  sub->add_option("--model", f->model, "Model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--t", f->t, "End of the horizon")->required();
  sub->add_option("--n", f->n, "Dyadic resolution, step 2^-n")->capture_default_str();
  sub->add_option("--m", f->m, "Laguerre order per increment")->capture_default_str();
  sub->add_option("--merge-tol", f->merge_tol)->capture_default_str();
  sub->add_option("--mass-floor", f->mass_floor)->capture_default_str();
  sub->add_option("--exact-max-intervals", f->exact_max_intervals, "Largest N enumerated exactly")
      ->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto model = load_model(f->model);
    AtomBuildOptions options;
    options.pruning = {f->merge_tol, f->mass_floor};
    options.exact_max_intervals = f->exact_max_intervals;
    const auto grid = build_grid(model.spec, model.t0, f->t, f->n);
    const auto set = atoms_for_grid(grid, model.law, f->m, options);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    std::ostringstream head;
    head << std::setprecision(kMachineDigits) << "n=" << f->n << " m=" << f->m << " N=" << grid.intervals
         << " mode=" << (set.mode() == AtomMode::exact ? "exact" : "pruned") << " atoms=" << set.size()
         << " mass_dropped=" << set.pruning_log().mass_dropped << " atoms_merged=" << set.pruning_log().atoms_merged;
    csv.comment(head.str());
    csv.header({"atom", "probability"});
    for (std::size_t i = 0; i < set.size(); ++i) csv.row({set.atoms()[i], set.probabilities()[i]});
  });
}

// -------------------------------------------------------------------- filter

Command add_filter(CLI::App& app) {
  struct Flags {
    std::string method = "brockwell";
    std::string model, data;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = app.add_subcommand("filter", "Recover the CARMA state from observations");
  sub->add_option("--method", f->method, "brockwell or kalman")->capture_default_str();
  sub->add_option("--model", f->model, "Model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--data", f->data, "t,y CSV")->required()->check(CLI::ExistingFile);
  return leaf(sub, [f](const RunConfig& run) {
    FilterMethod method;
    try {
      method = parse_filter_method(f->method);
    } catch (const std::invalid_argument& ex) {
      throw UsageError("--method", ex.what());
    }
    const auto model = load_model(f->model);
    const auto data = load_timeseries(f->data);
    // The Kalman filter treats the noise as Brownian with the subordinator's mean rate.
    const auto states =
        method == FilterMethod::kalman ? kalman_filter(model.spec, model.law.mean(), data) : brockwell_filter(model.spec, data);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    std::vector<std::string> cols = {"t"};
    for (int i = 1; i <= model.spec.p(); ++i) cols.push_back("x_" + std::to_string(i));
    csv.header(cols);
    for (std::size_t k = 0; k < states.states.size(); ++k) {
      std::vector<double> row = {states.times[k]};
      for (int i = 0; i < model.spec.p(); ++i) row.push_back(states.states[k](i));
      csv.row(row);
    }
  });
}

// ------------------------------------------------------------------ simulate

Command add_simulate(CLI::App& app) {
  struct Flags {
    std::string model;
    double T = 1.0, dt = 0.01;
    int paths = 1;
    std::uint64_t seed = 1;
    int subsample = 1;
    bool summary = false;
    bool series = false;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = app.add_subcommand("simulate", "Euler paths of the TCBm-CARMA output");
  sub->add_option("--model", f->model, "Model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--T", f->T, "Horizon")->required();
  sub->add_option("--dt", f->dt, "Euler step")->capture_default_str();
  sub->add_option("--paths", f->paths)->capture_default_str();
  sub->add_option("--seed", f->seed)->capture_default_str();
  sub->add_option("--subsample", f->subsample, "Emit every k-th Euler time")->capture_default_str();
  auto* summary = sub->add_flag("--summary", f->summary, "Emit t,mean,sd,min,max instead of paths");
  sub->add_flag("--series", f->series, "Single path as a t,y file readable by estimate and filter")->excludes(summary);
  return leaf(sub, [f](const RunConfig& run) {
    if (f->paths < 1) throw UsageError("--paths", "must be at least 1");
    if (f->subsample < 1) throw UsageError("--subsample", "must be at least 1");
    if (f->series && f->paths != 1) throw UsageError("--series", "requires --paths 1");
    const auto model = load_model(f->model);
    progress(run, "simulating " + std::to_string(f->paths) + " paths");
    const auto set = simulate_tcbm_carma(model.spec, model.law, f->T, f->dt, f->paths, f->seed, model.x0);
    const std::size_t last = set.times.size() - 1;
    const auto keep = [&](std::size_t i) { return i % static_cast<std::size_t>(f->subsample) == 0 || i == last; };
    if (f->series) {
      TimeSeries out;
      for (std::size_t i = 0; i <= last; ++i) {
        if (keep(i)) out.push_back({model.t0 + set.times[i], set.paths[0][i]});
      }
      if (run.output.empty()) {
        std::cout << std::setprecision(kMachineDigits) << "t,y\n";
        for (const auto& o : out) std::cout << o.t << ',' << o.y << '\n';
      } else {
        save_timeseries(run.output, out);
      }
      return;
    }
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    if (f->summary) {
      csv.header({"t", "mean", "sd", "min", "max"});
    } else {
      std::vector<std::string> cols = {"t"};
      for (int k = 1; k <= f->paths; ++k) cols.push_back("path_" + std::to_string(k));
      csv.header(cols);
    }
    for (std::size_t i = 0; i <= last; ++i) {
      if (!keep(i)) continue;
      std::vector<double> row = {model.t0 + set.times[i]};
      if (f->summary) {
        double mean = 0.0, lo = set.paths[0][i], hi = lo;
        for (const auto& p : set.paths) {
          mean += p[i];
          lo = std::min(lo, p[i]);
          hi = std::max(hi, p[i]);
        }
        mean /= set.paths.size();
        double ss = 0.0;
        for (const auto& p : set.paths) ss += (p[i] - mean) * (p[i] - mean);
        const double sd = set.paths.size() > 1 ? std::sqrt(ss / (set.paths.size() - 1)) : 0.0;
        row.insert(row.end(), {mean, sd, lo, hi});
      } else {
        for (const auto& p : set.paths) row.push_back(p[i]);
      }
      csv.row(row);
    }
  });
}

// ------------------------------------------------------------------ estimate

std::map<std::string, double> template_values(const ModelFile& model) {
  const auto names = parameter_names(model.spec.p(), model.spec.q(), model.law.family());
  std::map<std::string, double> out;
  for (int j = 0; j < model.spec.p(); ++j) out[names[j]] = model.spec.ar_coeffs()[j];
  for (int j = 0; j <= model.spec.q(); ++j) out[names[model.spec.p() + j]] = model.spec.ma_coeffs()[j];
  for (const auto& [k, v] : law_values(model.law)) out[k] = v;
  return out;
}

Command add_estimate(CLI::App& app) {
  struct Flags {
    std::string model, data, method;
    int order = 2, dyadic = 2;
    std::string identification = "law-scale";
    int restarts = 0;
    std::uint64_t seed = 0;
    int max_evaluations = 3000;
    bool standard_errors = false;
    bool gaussian_start = false;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = app.add_subcommand("estimate", "Maximum-likelihood or EM fit; key = value report plus a CSV summary");
  sub->add_option("--model-template", f->model, "Model file fixing p, q, law family and starting values")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--data", f->data, "t,y CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--method", f->method, "gl-hf, gl-hfkf, gaussian or em-nvmm")->required();
  sub->add_option("--order", f->order, "Laguerre order m")->capture_default_str()->check(CLI::Range(1, 180));
  sub->add_option("--dyadic", f->dyadic, "Dyadic resolution n")->capture_default_str();
  sub->add_option("--identification", f->identification, "law-scale or ma-leading")->capture_default_str();
  sub->add_option("--restarts", f->restarts, "Extra seeded Nelder-Mead starts")->capture_default_str();
  sub->add_option("--seed", f->seed)->capture_default_str();
  sub->add_option("--max-evals", f->max_evaluations)->capture_default_str();
  sub->add_flag("--se", f->standard_errors, "Standard errors from the numerical Hessian");
  sub->add_flag("--gaussian-start", f->gaussian_start, "Start from a Gaussian CARMA fit instead of the template");
  return leaf(sub, [f](const RunConfig& run) {
    static const char* methods[] = {"gl-hf", "gl-hfkf", "gaussian", "em-nvmm"};
    if (std::find(std::begin(methods), std::end(methods), f->method) == std::end(methods)) {
      throw UsageError("--method", "expected gl-hf, gl-hfkf, gaussian or em-nvmm, got '" + f->method + "'");
    }
    if (f->identification != "law-scale" && f->identification != "ma-leading") {
      throw UsageError("--identification", "expected law-scale or ma-leading");
    }
    const auto model = load_model(f->model);
    const auto data = load_timeseries(f->data);
    Sink sink(run.output);
    auto& os = sink.stream();
    std::vector<std::string> columns = {"method", "observations", "loglik", "converged"};
    std::vector<std::string> values;

    if (f->method == "em-nvmm") {
      std::vector<double> y;
      for (const auto& o : data) y.push_back(o.y);
      double mean = 0.0, var = 0.0;
      for (double v : y) mean += v;
      mean /= y.size();
      for (double v : y) var += (v - mean) * (v - mean);
      var /= y.size();
      const double level = model.law.mean();
      const auto fit = em_fit_nvmm(y, f->order, EmInit{{mean, 0.0, std::sqrt(var / level)}, model.law});
      std::map<std::string, double> est = {{"mu", fit.nvmm.mu}, {"theta", fit.nvmm.theta}, {"sigma", fit.nvmm.sigma}};
      for (const auto& [k, v] : law_values(fit.law)) est[k] = v;
      os << "method = em-nvmm\norder = " << f->order << "\nobservations = " << y.size() << '\n';
      for (const auto& [k, v] : est) os << "estimate." << k << " = " << num(v) << '\n';
      os << "loglik = " << num(fit.loglik) << "\niterations = " << fit.iterations
         << "\nconverged = " << (fit.converged ? "true" : "false") << "\n\n";
      values = {f->method, std::to_string(y.size()), num(fit.loglik), fit.converged ? "1" : "0"};
      for (const auto& [k, v] : est) {
        columns.push_back(k);
        values.push_back(num(v));
      }
    } else {
      FitConfig config;
      config.n = f->dyadic;
      config.m = f->order;
      config.filter = f->method == "gl-hf" ? FilterMethod::brockwell : FilterMethod::kalman;
      config.identification =
          f->identification == "law-scale" ? Identification::law_scale : Identification::ma_leading;
      config.restarts = f->restarts;
      config.seed = f->seed;
      config.max_evaluations = f->max_evaluations;
      config.standard_errors = f->standard_errors;
      if (!f->gaussian_start && f->method != "gaussian") config.initial = template_values(model);
      const int p = model.spec.p(), q = model.spec.q();
      progress(run, "fitting " + std::to_string(data.size()) + " observations");
      const auto fit = f->method == "gaussian" ? fit_gaussian_carma(data, p, q, config)
                                               : fit_tcbm_carma(data, p, q, model.law.family(), config);
      os << "method = " << f->method << "\np = " << p << "\nq = " << q;
      if (f->method != "gaussian") {
        os << "\nlaw = " << to_string(model.law.family()) << "\nfilter = " << to_string(config.filter)
           << "\nidentification = " << f->identification << "\ndyadic = " << f->dyadic << "\norder = " << f->order;
      }
      os << "\nobservations = " << data.size() << '\n';
      for (const auto& [k, v] : fit.estimates) {
        const bool fixed = std::find(fit.fixed.begin(), fit.fixed.end(), k) != fit.fixed.end();
        os << "estimate." << k << " = " << num(v) << (fixed ? "  # fixed" : "") << '\n';
      }
      if (fit.standard_errors) {
        for (const auto& [k, v] : *fit.standard_errors) os << "se." << k << " = " << num(v) << '\n';
      }
      os << "loglik = " << num(fit.loglik) << "\niterations = " << fit.iterations << "\nevaluations = " << fit.evaluations
         << "\nconverged = " << (fit.converged ? "true" : "false") << "\n\n";
      values = {f->method, std::to_string(data.size()), num(fit.loglik), fit.converged ? "1" : "0"};
      for (const auto& [k, v] : fit.estimates) {
        columns.push_back(k);
        values.push_back(num(v));
      }
      if (fit.standard_errors) {
        for (const auto& [k, v] : *fit.standard_errors) {
          columns.push_back("se_" + k);
          values.push_back(num(v));
        }
      }
    }
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
    os << '\n';
  });
}

// --------------------------------------------------------------------- price

struct PricingFlags {
  std::string model;
  int n = 8, m = 16;
  double merge_tol = 1e-3;
  int mc_paths = 0;
  std::uint64_t seed = 1;
  int steps = 200;
  int digits = kTableDigits;

  void attach(CLI::App* sub) {
    sub->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--n", n, "Dyadic resolution")->capture_default_str();
    sub->add_option("--m", m, "Laguerre order per increment")->capture_default_str();
    sub->add_option("--merge-tol", merge_tol, "Relative atom merge tolerance")->capture_default_str();
    sub->add_option("--mc-paths", mc_paths, "Monte Carlo paths (0 disables)")->capture_default_str();
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--steps", steps, "Euler steps per Monte Carlo path")->capture_default_str();
    sub->add_option("--digits", digits, "Significant digits")->capture_default_str();
  }
};

Command add_price_future(CLI::App* price) {
  struct Flags {
    PricingFlags common;
    std::vector<double> maturities;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = price->add_subcommand("future", "Futures term structure");
  f->common.attach(sub);
  sub->add_option("--T", f->maturities, "Maturities, comma separated")->required()->delimiter(',');
  return leaf(sub, [f](const RunConfig& run) {
    const auto setup = pricing_setup(load_model(f->common.model), f->common.n, f->common.m, f->common.merge_tol);
    const auto rows = term_structure(setup, f->maturities, f->common.mc_paths, f->common.seed, f->common.steps);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), f->common.digits);
    if (f->common.mc_paths > 0) csv.header({"T", "GaussL", "Closed", "MC", "UB", "LB"});
    else csv.header({"T", "GaussL", "Closed"});
    for (const auto& r : rows) {
      if (r.mc_mid) csv.row({r.T, r.laguerre, r.closed, *r.mc_mid, *r.mc_upper, *r.mc_lower});
      else if (f->common.mc_paths > 0) csv.row({r.T, r.laguerre, r.closed, kNaN, kNaN, kNaN});
      else csv.row({r.T, r.laguerre, r.closed});
    }
  });
}

Command add_price_option(CLI::App* price) {
  struct Flags {
    PricingFlags common;
    double T0 = 0.0, TF = 0.0;
    std::string strikes = "0.5:1.5:20";
    std::string route = "conditional";
  };
  auto f = std::make_shared<Flags>();
  auto* sub = price->add_subcommand("option", "Calls on a futures contract");
  f->common.attach(sub);
  sub->add_option("--T0", f->T0, "Option expiry")->required();
  sub->add_option("--TF", f->TF, "Futures maturity")->required();
  sub->add_option("--strikes", f->strikes, "LO:HI:COUNT")->capture_default_str();
  sub->add_option("--route", f->route, "conditional or fixed futures price per atom")->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto route = parse_route(f->route);
    const auto strikes = parse_count_grid(f->strikes, "--strikes");
    const auto setup = pricing_setup(load_model(f->common.model), f->common.n, f->common.m, f->common.merge_tol);
    const auto strip = futures_option_strip(setup, f->T0, f->TF, strikes, route);
    std::vector<McQuote> mc;
    if (f->common.mc_paths > 0) {
      mc = mc_futures_option_calls(setup, f->T0, f->TF, strikes, f->common.mc_paths, f->common.seed, f->common.steps);
    }
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), f->common.digits);
    if (mc.empty()) csv.header({"K", "GaussL"});
    else csv.header({"K", "GaussL", "MC", "UB", "LB"});
    for (std::size_t i = 0; i < strip.size(); ++i) {
      if (mc.empty()) csv.row({strip[i].strike, strip[i].call});
      else csv.row({strip[i].strike, strip[i].call, mc[i].mid, mc[i].upper, mc[i].lower});
    }
  });
}

// --------------------------------------------------------------------- repro

Command add_repro_fig1(CLI::App* repro) {
  auto* sub = repro->add_subcommand("fig1", "Gamma(1,1) and IG(1,1) MGF at m = 5 and m = 40");
  return leaf(sub, [](const RunConfig& run) {
    const double cs[] = {-2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75};
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    csv.header({"law", "c", "analytic", "approx_m5", "approx_m40", "abs_error_m5", "abs_error_m40"});
    const std::pair<const char*, MixingLaw> laws[] = {{"gamma", MixingLaw::gamma(1.0, 1.0)},
                                                      {"inverse_gaussian", MixingLaw::inverse_gaussian(1.0, 1.0)}};
    for (const auto& [name, law] : laws) {
      const auto m5 = discretize(law, 5);
      const auto m40 = discretize(law, 40);
      for (double c : cs) {
        double exact = kNaN;
        try {
          exact = analytic_mgf(law, c);
        } catch (const DomainError&) {
        }
        const double a5 = approx_mgf(m5, c), a40 = approx_mgf(m40, c);
        sink.stream() << name << ',';
        csv.row({c, exact, a5, a40, std::abs(a5 - exact), std::abs(a40 - exact)});
      }
    }
  });
}

Command add_repro_fig2(CLI::App* repro) {
  auto* sub = repro->add_subcommand("fig2", "VG-CAR(1) mixture MGF against the closed form");
  sub->alias("ou-mgf");
  return leaf(sub, [](const RunConfig& run) {
    const auto study = repro_ou_mgf();
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    csv.comment("atoms=" + std::to_string(study.atom_count) +
                " mode=" + (study.mode == AtomMode::exact ? "exact" : "pruned"));
    csv.header({"c", "mixture", "closed", "relative_error"});
    for (const auto& r : study.rows) csv.row({r.c, r.mixture, r.closed, r.relative_error});
  });
}

Command add_repro_table1(CLI::App* repro) {
  struct Flags {
    std::uint64_t seed = 1;
    int paths = 10000;
    int digits = kTableDigits;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = repro->add_subcommand("table1", "Futures term structure of the reference model with MC bounds");
  sub->add_option("--seed", f->seed)->capture_default_str();
  sub->add_option("--paths", f->paths)->capture_default_str();
  sub->add_option("--digits", f->digits)->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto rows = repro_term_structure(f->seed, f->paths);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), f->digits);
    csv.header({"T", "GaussL", "Closed", "MC", "UB", "LB"});
    for (const auto& r : rows) csv.row({r.T, r.laguerre, r.closed, *r.mc_mid, *r.mc_upper, *r.mc_lower});
  });
}

Command add_repro_options(CLI::App* repro) {
  struct Flags {
    std::uint64_t seed = 1;
    int paths = 10000;
    std::string route = "conditional";
    int digits = kTableDigits;
  };
  auto f = std::make_shared<Flags>();
  auto* sub = repro->add_subcommand("options", "Futures option tables for one to three months");
  sub->add_option("--seed", f->seed)->capture_default_str();
  sub->add_option("--paths", f->paths)->capture_default_str();
  sub->add_option("--route", f->route, "conditional or fixed")->capture_default_str();
  sub->add_option("--digits", f->digits)->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto tables = repro_option_tables(f->seed, f->paths, parse_route(f->route));
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), f->digits);
    for (std::size_t t = 0; t < tables.size(); ++t) {
      const auto& table = tables[t];
      if (t) sink.stream() << '\n';
      std::ostringstream head;
      head << std::setprecision(f->digits) << "T0=" << table.T0 << " TF=" << table.TF;
      csv.comment(head.str());
      csv.header({"K", "GaussL", "MC", "UB", "LB"});
      for (std::size_t i = 0; i < table.laguerre.size(); ++i) {
        csv.row({table.laguerre[i].strike, table.laguerre[i].call, table.mc[i].mid, table.mc[i].upper,
                 table.mc[i].lower});
      }
    }
  });
}

Command add_repro_blocks(CLI::App* repro) {
  struct Flags {
    std::string block = "all";
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  };
  auto f = std::make_shared<Flags>();
  auto* sub = repro->add_subcommand("estimation-blocks", "Seeded simulate-and-fit blocks for CAR(1) and CARMA(2,1)");
  sub->add_option("--block", f->block, "car1, carma21 or all")->capture_default_str();
  sub->add_option("--seeds", f->seeds, "Comma separated seeds")->delimiter(',')->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    if (f->block != "car1" && f->block != "carma21" && f->block != "all") {
      throw UsageError("--block", "expected car1, carma21 or all");
    }
    Sink sink(run.output);
    auto& os = sink.stream();
    bool first = true;
    const auto emit = [&](const EstimationBlock& block) {
      if (!first) os << '\n';
      first = false;
      os << "# " << block.name << " observations=" << block.observations << " truth:";
      for (const auto& [k, v] : block.truth) os << ' ' << k << '=' << num(v);
      os << '\n' << "seed,filter";
      for (const auto& [k, v] : block.truth) os << ',' << k;
      os << ",loglik,converged,worst_deviation\n";
      for (const auto& fit : block.fits) {
        os << fit.seed << ',' << to_string(fit.filter);
        for (const auto& [k, v] : block.truth) os << ',' << num(fit.result.estimates.at(k));
        os << ',' << num(fit.result.loglik) << ',' << (fit.result.converged ? 1 : 0) << ','
           << num(worst_deviation(block, fit)) << '\n';
      }
    };
    if (f->block != "carma21") {
      progress(run, "CAR(1) block");
      emit(repro_car1_block(f->seeds));
    }
    if (f->block != "car1") {
      progress(run, "CARMA(2,1) block");
      emit(repro_carma21_block(f->seeds));
    }
  });
}

Command add_repro_error_study(CLI::App* repro) {
  struct Flags {
    std::vector<int> orders = {5, 10, 20, 40, 80};
  };
  auto f = std::make_shared<Flags>();
  auto* sub = repro->add_subcommand("error-study", "ATM VG call error against the m = 150 price");
  sub->add_option("--orders", f->orders, "Comma separated orders")->delimiter(',')->capture_default_str();
  return leaf(sub, [f](const RunConfig& run) {
    const auto study = repro_nvmm_error_study(f->orders);
    Sink sink(run.output);
    CsvWriter csv(sink.stream(), kMachineDigits);
    csv.comment("reference=" + num(study.reference) + " log_linear_r2=" + num(study.log_linear_r2));
    csv.header({"m", "price", "abs_error"});
    for (const auto& r : study.rows) csv.row({static_cast<double>(r.m), r.price, r.abs_error});
  });
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  std::vector<Command> out;
  out.push_back(add_quadrature(app));

  auto* nvmm = app.add_subcommand("nvmm", "Normal variance-mean mixtures");
  nvmm->require_subcommand(1);
  out.push_back(add_nvmm_mgf(nvmm));
  out.push_back(add_nvmm_density(nvmm));
  out.push_back(add_nvmm_em(nvmm));
  out.push_back(add_nvmm_price(nvmm));

  out.push_back(add_variance_atoms(app));
  out.push_back(add_filter(app));
  out.push_back(add_simulate(app));
  out.push_back(add_estimate(app));

  auto* price = app.add_subcommand("price", "Futures and futures-option pricing");
  price->require_subcommand(1);
  out.push_back(add_price_future(price));
  out.push_back(add_price_option(price));

  auto* repro = app.add_subcommand("repro", "Pinned reproduction recipes");
  repro->require_subcommand(1);
  out.push_back(add_repro_fig1(repro));
  out.push_back(add_repro_fig2(repro));
  out.push_back(add_repro_table1(repro));
  out.push_back(add_repro_options(repro));
  out.push_back(add_repro_blocks(repro));
  out.push_back(add_repro_error_study(repro));
  return out;
}

}  // namespace lagcarma::cli
