#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/expfam.hpp"
#include "seqlab/io.hpp"
#include "seqlab/sim.hpp"

namespace seqlab::cli {

struct Common {
  std::string config_path;
  std::string in_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> workers;
  std::string format = "csv";
  bool wall_time = false;
};

// Loads the config file (if any) and rejects keys outside `allowed` plus the
// run keys seed, reps and workers.
io::KeyValues load_config(const Common& common, std::vector<std::string> allowed);

struct RunSettings {
  std::uint64_t seed;
  std::size_t reps;
  std::size_t workers;
};

// Flags override config keys; defaults are seed 1, the given reps, 1 worker.
RunSettings run_settings(const Common& common, const io::KeyValues& kv, std::size_t default_reps);

expfam::Family family_of(const io::KeyValues& kv);
std::size_t get_size(const io::KeyValues& kv, const std::string& key, std::size_t fallback);
std::size_t get_size(const io::KeyValues& kv, const std::string& key);
std::vector<std::size_t> get_sizes(const io::KeyValues& kv, const std::string& key,
                                   std::vector<std::size_t> fallback);

std::string require_input(const Common& common);

// --out or standard output.
class Output {
 public:
  explicit Output(const std::string& path);
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

io::ReportFormat report_format(const Common& common);

void write_reports(const Common& common, std::vector<SimReport> reports, double elapsed);

using Pairs = std::vector<std::pair<std::string, std::string>>;
void write_pairs(std::ostream& out, const Pairs& pairs);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string num(double x);
std::string num(std::size_t x);

// Subcommand entry points.
void cmd_sprt(const Common& c);
void cmd_2sprt(const Common& c);
void cmd_glr(const Common& c);
void cmd_detector(const Common& c, const std::string& kind);
void cmd_isolate(const Common& c);
void cmd_bcmix_filter(const Common& c);
void cmd_bcmix_smooth(const Common& c);
void cmd_surveil(const Common& c);
void cmd_exshiryaev(const Common& c);
void cmd_fit_hyper(const Common& c);
void cmd_renewal(const Common& c);
void cmd_design(const Common& c, bool four_stage);
void cmd_groupseq_2sprt(const Common& c);
void cmd_calibrate(const Common& c);

}  // namespace seqlab::cli
