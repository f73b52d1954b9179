// renewal: linear, power and perturbed-boundary first passages.

#include <cmath>

#include "common.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/renewal.hpp"

namespace seqlab::cli {

void cmd_renewal(const Common& c) {
  const auto kv = load_config(c, {"family", "drift", "sd", "boundary", "b_grid", "u", "alpha_power",
                                  "h", "d", "rho", "eps", "max_n"});
  const std::string fam = kv.get_string("family", "gaussian");
  const double drift = kv.get_double("drift", 1.0);
  if (!(drift > 0.0)) throw ConfigError("drift must be positive");
  renewal::Sampler sampler;
  if (fam == "gaussian") {
    sampler = renewal::gaussian_sampler(drift, kv.get_double("sd", 1.0));
  } else if (fam == "exponential") {
    sampler = renewal::exponential_sampler(1.0 / drift);
  } else {
    throw ConfigError("renewal family must be gaussian or exponential");
  }
  const std::string boundary = kv.get_string("boundary", "linear");
  const std::vector<double> b_grid = kv.get_list("b_grid", {25, 50, 100, 200});
  for (double b : b_grid)
    if (!(b > 0.0)) throw ConfigError("b_grid values must be positive");
  const double u = kv.get_double("u", 0.0);
  const std::size_t max_n = get_size(kv, "max_n", 10000000);
  const RunSettings rs = run_settings(c, kv, 10000);
  const renewal::SimOptions so{rs.reps, rs.seed, rs.workers, max_n};
  Stopwatch sw;
  std::vector<SimReport> reports;

  if (boundary == "linear") {
    if (!(drift > u)) throw ConfigError("drift must exceed u");
    std::vector<double> mean_tau;
    std::vector<double> tau_se;
    for (std::size_t k = 0; k < b_grid.size(); ++k) {
      const double b = b_grid[k];
      renewal::SimOptions o = so;
      o.seed = rs.seed + k + 1;
      const auto ps = renewal::simulate_linear(sampler, b, u, o);
      const std::string tag = "b=" + num(b);
      const double mu = drift - u;
      reports.push_back({"mean_tau_" + tag, ps.tau.value, ps.tau.std_error, rs.reps, o.seed, 0.0});
      reports.push_back({"corrected_" + tag, mu * ps.tau.value - b, mu * ps.tau.std_error, rs.reps,
                         o.seed, 0.0});
      reports.push_back({"overshoot_" + tag, ps.overshoot.value, ps.overshoot.std_error, rs.reps,
                         o.seed, 0.0});
      mean_tau.push_back(ps.tau.value);
      tau_se.push_back(ps.tau.std_error);
    }
    const auto rho = renewal::estimate_rho(sampler, u, so);
    reports.push_back({"rho_plus", rho.rho_plus.value, rho.rho_plus.std_error, rho.reps, rs.seed, 0.0});
    if (b_grid.size() >= 2) {
      const auto fit = renewal::fit_c0(b_grid, mean_tau, tau_se, drift - u);
      reports.push_back({"c0_slope", fit.slope, fit.slope_se, rs.reps, rs.seed, 0.0});
      reports.push_back({"c0_intercept", fit.intercept, fit.intercept_se, rs.reps, rs.seed, 0.0});
    }
  } else if (boundary == "power") {
    const double ap = kv.get_double("alpha_power", 0.5);
    for (std::size_t k = 0; k < b_grid.size(); ++k) {
      const double lambda = b_grid[k];
      auto r = replicate({"mean_tau_lambda=" + num(lambda), "overshoot_lambda=" + num(lambda)},
                         {rs.reps, rs.seed + k + 1, rs.workers},
                         [&](std::size_t, Rng& rng, std::span<double> out) {
                           const auto x = renewal::cross_power(renewal::sampler_stream(sampler, rng),
                                                               lambda, ap, max_n);
                           out[0] = static_cast<double>(x.tau);
                           out[1] = x.overshoot;
                         });
      reports.insert(reports.end(), r.begin(), r.end());
    }
  } else if (boundary == "general") {
    if (fam != "gaussian") throw ConfigError("general boundary uses jointly Gaussian increments");
    const std::string h = kv.get_string("h", "min");
    if (h != "zero" && h != "min") throw ConfigError("h must be zero or min");
    const auto joint = renewal::joint_gaussian_sampler(drift, get_size(kv, "d", 1),
                                                       kv.get_double("rho", 0.0));
    const double eps = kv.get_double("eps", 0.0);
    const std::function<double(std::size_t)> eps_fn = [eps](std::size_t) { return eps; };
    const auto pert = h == "min" ? renewal::Perturbation::min : renewal::Perturbation::zero;
    for (std::size_t k = 0; k < b_grid.size(); ++k) {
      const double b = b_grid[k];
      auto r = replicate({"mean_tau_b=" + num(b), "corrected_b=" + num(b)},
                         {rs.reps, rs.seed + k + 1, rs.workers},
                         [&](std::size_t, Rng& rng, std::span<double> out) {
                           auto next = [&]() -> std::optional<renewal::JointIncrement> {
                             return joint(rng);
                           };
                           const auto x = renewal::cross_general(next, pert, eps_fn, b, max_n);
                           out[0] = static_cast<double>(x.tau);
                           out[1] = drift * static_cast<double>(x.tau) - b;
                         });
      reports.insert(reports.end(), r.begin(), r.end());
    }
  } else {
    throw ConfigError("boundary must be linear, power or general");
  }
  write_reports(c, std::move(reports), sw.seconds());
}

}  // namespace seqlab::cli
