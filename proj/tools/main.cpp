#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "common.hpp"
#include "seqlab/errors.hpp"

namespace {

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

int fail(const char* kind, const std::exception& e, int code) {
  std::cerr << "error: " << kind << ": " << one_line(e.what()) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace seqlab::cli;
  CLI::App app{"Sequential testing, changepoint detection and group-sequential design"};
  app.require_subcommand(1);
  Common common;
  std::function<void()> action;

  auto add = [&](const std::string& name, const std::string& help, std::function<void()> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config_path, "key = value config file");
    sub->add_option("--in", common.in_path, "input CSV with header t,x");
    sub->add_option("--out", common.out_path, "output path (default stdout)");
    sub->add_option("--seed", common.seed, "base random seed");
    sub->add_option("--reps", common.reps, "Monte Carlo replications");
    sub->add_option("--workers", common.workers, "worker threads");
    sub->add_option("--format", common.format, "report format: csv or kv");
    sub->add_flag("--wall-time", common.wall_time, "record elapsed seconds in reports");
    sub->callback([&action, fn] { action = fn; });
  };

  add("sprt", "Wald SPRT between two simple hypotheses", [&] { cmd_sprt(common); });
  add("2sprt", "Lorden 2-SPRT at an intermediate parameter", [&] { cmd_2sprt(common); });
  add("glr", "Schwarz or Lai GLR test", [&] { cmd_glr(common); });
  for (const char* kind : {"cusum", "sr", "shiryaev", "wl-cusum", "wl-mix"}) {
    const std::string k = kind;
    add(k, "changepoint detector " + k, [&common, k] { cmd_detector(common, k); });
  }
  add("isolate", "windowed detection-isolation", [&] { cmd_isolate(common); });
  add("bcmix-filter", "forward filter (exact or bounded complexity)",
      [&] { cmd_bcmix_filter(common); });
  add("bcmix-smooth", "forward-backward smoother", [&] { cmd_bcmix_smooth(common); });
  add("surveil", "windowed posterior-mass surveillance", [&] { cmd_surveil(common); });
  add("exshiryaev", "extended Shiryaev surveillance", [&] { cmd_exshiryaev(common); });
  add("fit-hyper", "empirical Bayes change frequency", [&] { cmd_fit_hyper(common); });
  add("renewal", "first-passage and overshoot simulation", [&] { cmd_renewal(common); });
  add("design-3stage", "three-stage adaptive GLR design", [&] { cmd_design(common, false); });
  add("design-4stage", "four-stage design with sample size increase",
      [&] { cmd_design(common, true); });
  add("groupseq-2sprt", "group-sequential 2-SPRT", [&] { cmd_groupseq_2sprt(common); });
  add("calibrate", "calibrate multistage design thresholds", [&] { cmd_calibrate(common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    action();
  } catch (const seqlab::ConfigError& e) {
    return fail("config", e, 2);
  } catch (const seqlab::DataError& e) {
    return fail("data", e, 3);
  } catch (const seqlab::NumericError& e) {
    return fail("numeric", e, 4);
  } catch (const std::exception& e) {
    return fail("internal", e, 1);
  }
  return 0;
}
