#include "common.hpp"

#include <cmath>
#include <iostream>
#include <set>

#include "seqlab/errors.hpp"

namespace seqlab::cli {

io::KeyValues load_config(const Common& common, std::vector<std::string> allowed) {
  io::KeyValues kv;
  if (!common.config_path.empty()) kv = io::KeyValues::load(common.config_path);
  std::set<std::string> keys(allowed.begin(), allowed.end());
  keys.insert({"seed", "reps", "workers"});
  kv.reject_unknown(keys);
  return kv;
}

RunSettings run_settings(const Common& common, const io::KeyValues& kv, std::size_t default_reps) {
  RunSettings s{};
  const long long seed = kv.get_int("seed", 1);
  if (seed < 0) throw ConfigError("seed must be nonnegative");
  s.seed = common.seed ? *common.seed : static_cast<std::uint64_t>(seed);
  s.reps = common.reps ? *common.reps : get_size(kv, "reps", default_reps);
  s.workers = common.workers ? *common.workers : get_size(kv, "workers", 1);
  if (s.reps < 2) throw ConfigError("reps must be at least 2");
  if (s.workers < 1) throw ConfigError("workers must be at least 1");
  return s;
}

expfam::Family family_of(const io::KeyValues& kv) {
  return expfam::Family::from_name(kv.get_string("family", "gaussian"));
}

std::size_t get_size(const io::KeyValues& kv, const std::string& key, std::size_t fallback) {
  return kv.has(key) ? get_size(kv, key) : fallback;
}

std::size_t get_size(const io::KeyValues& kv, const std::string& key) {
  const long long v = kv.get_int(key);
  if (v < 0) throw ConfigError("key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> get_sizes(const io::KeyValues& kv, const std::string& key,
                                   std::vector<std::size_t> fallback) {
  if (!kv.has(key)) return fallback;
  std::vector<std::size_t> out;
  for (double v : kv.get_list(key)) {
    if (!(v >= 0.0) || v != std::floor(v))
      throw ConfigError("key '" + key + "' must list nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string require_input(const Common& common) {
  if (common.in_path.empty()) throw ConfigError("this subcommand needs --in");
  return common.in_path;
}

Output::Output(const std::string& path) : out_(&std::cout) {
  if (!path.empty()) {
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot open output file " + path);
    out_ = file_.get();
  }
}

io::ReportFormat report_format(const Common& common) {
  if (common.format == "csv") return io::ReportFormat::csv;
  if (common.format == "kv") return io::ReportFormat::kv;
  throw ConfigError("format must be csv or kv");
}

void write_reports(const Common& common, std::vector<SimReport> reports, double elapsed) {
  for (auto& r : reports) r.wall_time = common.wall_time ? elapsed : 0.0;
  Output out(common.out_path);
  io::emit_report(out.stream(), reports, report_format(common));
}

void write_pairs(std::ostream& out, const Pairs& pairs) {
  for (const auto& [k, v] : pairs) out << k << " = " << v << '\n';
}

std::string num(double x) { return io::format_double(x); }
std::string num(std::size_t x) { return std::to_string(x); }

}  // namespace seqlab::cli
