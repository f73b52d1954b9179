// cusum, sr, shiryaev, wl-cusum, wl-mix, isolate.

#include <cmath>

#include "common.hpp"
#include "seqlab/changepoint.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/numeric.hpp"
#include "seqlab/rng.hpp"

namespace seqlab::cli {

void cmd_detector(const Common& c, const std::string& kind_name) {
  const auto kv = load_config(c, {"family", "theta0", "theta1", "threshold", "p", "r0", "m",
                                  "grid", "weights", "alpha", "theta_post", "nus", "pfa_starts",
                                  "pfa_window", "max_n"});
  cpd::DetectorSpec spec;
  spec.kind = cpd::detector_kind_from_name(kind_name);
  spec.family = family_of(kv);
  spec.theta0 = kv.get_double("theta0", 0.0);
  spec.theta1 = kv.get_double("theta1", 1.0);
  spec.p = kv.get_double("p", 0.0);
  spec.r0 = kv.get_double("r0", 0.0);
  spec.grid = kv.get_list("grid", {});
  spec.weights = kv.get_list("weights", {});
  if (!spec.grid.empty() && spec.weights.empty())
    spec.weights.assign(spec.grid.size(), 1.0 / static_cast<double>(spec.grid.size()));
  const bool windowed =
      spec.kind == cpd::DetectorKind::wl_cusum || spec.kind == cpd::DetectorKind::wl_mix;
  if (windowed) {
    if (kv.has("m")) {
      spec.m = get_size(kv, "m");
    } else if (kv.has("alpha") && spec.kind == cpd::DetectorKind::wl_cusum) {
      spec.family.require_in_domain(spec.theta1);
      spec.m = cpd::window_size(kv.get_double("alpha"),
                                expfam::kl(spec.family, spec.theta1, spec.theta0));
    } else {
      throw ConfigError("windowed detectors need m (or alpha for wl-cusum)");
    }
  }
  if (kv.has("threshold")) {
    spec.threshold = kv.get_double("threshold");
  } else if (windowed && kv.has("alpha")) {
    spec.threshold = cpd::wl_threshold(kv.get_double("alpha"), spec.m);
  } else {
    throw ConfigError("threshold is required");
  }
  cpd::validate(spec);

  cpd::ModelSpec model{spec.family, spec.theta0, kv.get_double("theta_post", spec.theta1)};
  spec.family.require_in_domain(model.theta_post);
  cpd::MetricsOptions mo;
  mo.nus = get_sizes(kv, "nus", {1});
  mo.pfa_starts = get_sizes(kv, "pfa_starts", {});
  mo.pfa_window = get_size(kv, "pfa_window", windowed ? spec.m : 0);
  mo.max_n = get_size(kv, "max_n", mo.max_n);
  const RunSettings rs = run_settings(c, kv, 1000);
  mo.reps = rs.reps;
  mo.seed = rs.seed;
  mo.workers = rs.workers;

  if (!c.in_path.empty()) {
    auto det = cpd::make_detector(spec);
    io::CsvReader reader(c.in_path, 1);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "n,statistic,decision\n";
    std::size_t n = 0;
    while (auto row = reader.next()) {
      ++n;
      const double x = row->x[0];
      if (!std::isfinite(x)) throw DataError("non-finite observation at line " + num(reader.line()));
      if (det->step(x)) {
        os << n << ',' << num(det->statistic()) << ",1\n";
        det->reset();
      }
    }
    return;
  }
  Stopwatch sw;
  auto reports = cpd::estimate_metrics(spec, model, mo);
  write_reports(c, std::move(reports), sw.seconds());
}

void cmd_isolate(const Common& c) {
  const auto kv = load_config(c, {"family", "theta0", "thetas", "m", "threshold", "alpha",
                                  "truth", "nu", "max_n"});
  const auto family = family_of(kv);
  const double theta0 = kv.get_double("theta0", 0.0);
  family.require_in_domain(theta0);
  const std::vector<double> thetas = kv.get_list("thetas");
  const std::size_t N = thetas.size();
  if (N < 2) throw ConfigError("isolation needs at least 2 post-change hypotheses");
  double min_info = kInf;
  for (double t : thetas) {
    family.require_in_domain(t);
    min_info = std::min(min_info, expfam::kl(family, t, theta0));
  }
  const double alpha = kv.get_double("alpha", 0.01);
  const std::size_t m =
      kv.has("m") ? get_size(kv, "m") : cpd::window_size(alpha, min_info);
  if (m < 1) throw ConfigError("window m must be at least 1");
  const double a = kv.get_double("threshold", cpd::isolation_threshold(N, alpha));
  const std::size_t truth = get_size(kv, "truth", 1);
  if (truth < 1 || truth > N) throw ConfigError("truth must index one of the thetas");
  const std::size_t nu = get_size(kv, "nu", 1);
  if (nu < 1) throw ConfigError("nu must be at least 1");
  const std::size_t max_n = get_size(kv, "max_n", 1000000);
  const RunSettings rs = run_settings(c, kv, 1000);

  auto increments = [&](double x, std::vector<double>& z) {
    for (std::size_t i = 0; i < N; ++i) z[i] = expfam::log_density_ratio(family, thetas[i], theta0, x);
  };

  if (!c.in_path.empty()) {
    io::CsvReader reader(c.in_path);
    if (reader.columns() != 1 && reader.columns() != N)
      throw DataError("input must have 1 observation column or " + num(N) + " increment columns");
    cpd::DetectIsolate rule(N, m);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "n,statistic,decision\n";
    std::vector<double> z(N);
    std::size_t n = 0;
    while (auto row = reader.next()) {
      ++n;
      for (double v : row->x)
        if (!std::isfinite(v)) throw DataError("non-finite value at line " + num(reader.line()));
      if (reader.columns() == 1) {
        increments(row->x[0], z);
      } else {
        z = row->x;
      }
      rule.push(z);
      const double s = rule.statistic();
      if (s >= a) {
        os << n << ',' << num(s) << ',' << rule.decision() << '\n';
        rule.reset();
      }
    }
    return;
  }
  Stopwatch sw;
  auto reports = replicate(
      {"correct_isolation", "detection_delay", "false_alarm", "no_alarm"},
      {rs.reps, rs.seed, rs.workers}, [&](std::size_t, Rng& rng, std::span<double> out) {
        cpd::DetectIsolate rule(N, m);
        std::vector<double> z(N);
        std::optional<cpd::Alarm> alarm;
        for (std::size_t n = 1; n <= max_n && !alarm; ++n) {
          const double th = n >= nu ? thetas[truth - 1] : theta0;
          increments(family.sample(th, rng), z);
          rule.push(z);
          const double s = rule.statistic();
          if (s >= a) alarm = cpd::Alarm{n, s, rule.decision()};
        }
        const double nan = std::nan("");
        out[3] = alarm ? 0.0 : 1.0;
        out[2] = alarm && alarm->time < nu ? 1.0 : 0.0;
        if (alarm && alarm->time >= nu) {
          out[0] = *alarm->isolated == truth ? 1.0 : 0.0;
          out[1] = static_cast<double>(alarm->time - nu + 1);
        } else {
          out[0] = nan;
          out[1] = nan;
        }
      });
  write_reports(c, std::move(reports), sw.seconds());
}

}  // namespace seqlab::cli
