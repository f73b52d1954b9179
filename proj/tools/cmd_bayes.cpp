// bcmix-filter, bcmix-smooth, surveil, exshiryaev, fit-hyper.

#include <cmath>
#include <fstream>
#include <optional>

#include "common.hpp"
#include "seqlab/bcmix.hpp"
#include "seqlab/errors.hpp"

namespace seqlab::cli {

namespace {

const std::vector<std::string> kHyperKeys{"family", "p", "a0", "mu0"};

std::vector<std::string> with_hyper(std::vector<std::string> extra) {
  extra.insert(extra.end(), kHyperKeys.begin(), kHyperKeys.end());
  return extra;
}

bcmix::HyperParams read_hyper(const io::KeyValues& kv) {
  bcmix::HyperParams hp;
  hp.family = family_of(kv);
  hp.p = kv.get_double("p", hp.p);
  hp.a0 = kv.get_double("a0", hp.a0);
  const expfam::Interval md = hp.family.mean_domain();
  const double mid = std::isfinite(md.lo) && std::isfinite(md.hi) ? 0.5 * (md.lo + md.hi)
                     : std::isfinite(md.lo)                      ? md.lo + 1.0
                                                                 : 0.0;
  hp.mu0 = kv.get_double("mu0", mid);
  bcmix::validate(hp);
  return hp;
}

// exact = true disables pruning; otherwise prune_m / prune_M (defaults 10, 20).
std::optional<bcmix::PruneOptions> read_prune(const io::KeyValues& kv) {
  const std::string exact = kv.get_string("exact", "false");
  if (exact != "true" && exact != "false") throw ConfigError("exact must be true or false");
  bcmix::PruneOptions po;
  po.m = get_size(kv, "prune_m", po.m);
  po.M = get_size(kv, "prune_M", po.M);
  if (!(po.m < po.M)) throw ConfigError("prune_m must be below prune_M");
  if (exact == "true") return std::nullopt;
  return po;
}

void write_estimates(const Common& c, std::span<const double> t_values,
                     const std::vector<bcmix::SmoothEstimate>& est) {
  Output out(c.out_path);
  auto& os = out.stream();
  os << "t,change_prob,posterior_mean\n";
  for (std::size_t k = 0; k < est.size(); ++k)
    os << num(t_values[k]) << ',' << num(est[k].change_prob) << ',' << num(est[k].posterior_mean)
       << '\n';
}

struct Series {
  std::vector<double> t;
  std::vector<double> x;
};

Series read_rows(const std::string& path) {
  io::CsvReader reader(path, 1);
  Series s;
  while (auto row = reader.next()) {
    if (!std::isfinite(row->x[0])) throw DataError("non-finite value at line " + num(reader.line()));
    s.t.push_back(row->t);
    s.x.push_back(row->x[0]);
  }
  return s;
}

void write_alarm(const Common& c, const std::optional<bcmix::Alarm>& alarm) {
  Output out(c.out_path);
  auto& os = out.stream();
  os << "n,statistic,decision\n";
  if (alarm) os << alarm->time << ',' << num(alarm->statistic) << ",1\n";
}

}  // namespace

void cmd_bcmix_filter(const Common& c) {
  const auto kv = load_config(
      c, with_hyper({"exact", "prune_m", "prune_M", "snapshot_in", "snapshot_out"}));
  bcmix::HyperParams hp;
  bcmix::WeightSet ws;
  const auto prune = read_prune(kv);
  if (kv.has("snapshot_in")) {
    for (const auto& key : kHyperKeys)
      if (kv.has(key)) throw ConfigError("'" + key + "' conflicts with snapshot_in");
    std::ifstream in(kv.get_string("snapshot_in"));
    if (!in) throw ConfigError("cannot open snapshot " + kv.get_string("snapshot_in"));
    std::tie(hp, ws) = bcmix::load_snapshot(in);
  } else {
    hp = read_hyper(kv);
  }
  const std::string input = require_input(c);
  io::CsvReader reader(input, 1);
  Output out(c.out_path);
  auto& os = out.stream();
  os << "t,change_prob,posterior_mean\n";
  while (auto row = reader.next()) {
    const double x = row->x[0];
    if (!std::isfinite(x)) throw DataError("non-finite value at line " + num(reader.line()));
    ws = bcmix::forward_step(hp, ws, x);
    if (prune) bcmix::bcmix_prune(ws, prune->m, prune->M);
    const auto e = bcmix::filter_estimates(hp, ws);
    os << num(row->t) << ',' << num(e.change_prob) << ',' << num(e.posterior_mean) << '\n';
  }
  if (kv.has("snapshot_out")) {
    std::ofstream snap(kv.get_string("snapshot_out"));
    if (!snap) throw ConfigError("cannot open snapshot " + kv.get_string("snapshot_out"));
    bcmix::save_snapshot(snap, hp, ws);
  }
}

void cmd_bcmix_smooth(const Common& c) {
  const auto kv = load_config(c, with_hyper({"exact", "prune_m", "prune_M"}));
  const auto hp = read_hyper(kv);
  const auto prune = read_prune(kv);
  const Series s = read_rows(require_input(c));
  write_estimates(c, s.t, bcmix::smoother(hp, s.x, prune));
}

void cmd_surveil(const Common& c) {
  const auto kv = load_config(c, with_hyper({"k", "gamma", "n0", "prune_m", "prune_M"}));
  const auto hp = read_hyper(kv);
  bcmix::PruneOptions po;
  po.m = get_size(kv, "prune_m", po.m);
  po.M = get_size(kv, "prune_M", po.M);
  if (!(po.m < po.M)) throw ConfigError("prune_m must be below prune_M");
  const std::size_t k = get_size(kv, "k");
  const double gamma = kv.get_double("gamma");
  const std::size_t n0 = get_size(kv, "n0", 1);
  const Series s = read_rows(require_input(c));
  write_alarm(c, bcmix::mcp_surveil(hp, k, gamma, n0, s.x, po));
}

void cmd_exshiryaev(const Common& c) {
  const auto kv = load_config(c, with_hyper({"k", "gamma", "n0"}));
  const auto hp = read_hyper(kv);
  const std::size_t k = get_size(kv, "k");
  const double gamma = kv.get_double("gamma");
  const std::size_t n0 = get_size(kv, "n0", 1);
  const Series s = read_rows(require_input(c));
  write_alarm(c, bcmix::extended_shiryaev(hp, n0, k, gamma, s.x));
}

void cmd_fit_hyper(const Common& c) {
  const auto kv = load_config(c, {"family", "a0", "grid", "exact", "prune_m", "prune_M"});
  bcmix::FitOptions fo;
  const auto family = family_of(kv);
  fo.a0 = kv.get_double("a0", fo.a0);
  fo.grid = kv.get_list("grid", {});
  fo.prune = read_prune(kv);
  const Series s = read_rows(require_input(c));
  const auto fit = bcmix::fit_hyperparams(family, s.x, fo);
  Pairs p{{"family", std::string(family.name())},
          {"p", num(fit.params.p)},
          {"a0", num(fit.params.a0)},
          {"mu0", num(fit.params.mu0)}};
  for (std::size_t k = 0; k < fit.grid.size(); ++k)
    p.push_back({"log_lik[p=" + num(fit.grid[k]) + "]", num(fit.log_lik[k])});
  Output out(c.out_path);
  write_pairs(out.stream(), p);
}

}  // namespace seqlab::cli
