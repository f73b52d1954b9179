#pragma once

// Group-sequential designs for one-parameter exponential families with
// u(theta) = theta: Hoeffding's lower bound, the group-sequential 2-SPRT,
// the adaptive three-stage GLR test, its four-stage extension with a
// mid-course increase of the maximum sample size, and threshold calibration.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqlab/expfam.hpp"

namespace seqlab::groupseq {

// Lower bound on E_theta(T) for tests with error probabilities alpha at
// theta0 and beta at theta1. Floored at 0; +inf when zeta = 0.
double hoeffding_bound(const expfam::Family& family, double theta, double theta0, double theta1,
                       double alpha, double beta);

// min{|log alpha| / I(theta, u0), |log alpha_tilde| / I(theta, u1)}; a zero
// information number makes its branch +inf.
double n_opt(const expfam::Family& family, double theta, double u0, double u1, double alpha,
             double alpha_tilde);

// sign(theta_hat - u_j) sqrt(2 n lambda) for the per-observation GLR value
// lambda = I(theta_hat, u_j).
double signed_root(double lambda, std::size_t n, double theta_hat, double u_j);

// n I(theta_hat, u): the log-GLR of a sample of size n against u(theta) = u.
double log_glr(const expfam::Family& family, double theta_hat, std::size_t n, double u);

struct Design {
  expfam::Family family = expfam::Family::gaussian();
  double u0 = 0.0;
  double u1 = 0.5;
  double u2 = 0.5;  // four-stage only
  double alpha = 0.05;
  double alpha_tilde = 0.05;
  std::size_t m = 20;
  std::size_t M = 100;
  std::size_t M_prime = 100;  // four-stage only
  std::size_t M_tilde = 100;  // four-stage only
  double rho_m = 0.1;
  double eps = 0.5;
  double eps_tilde = 0.5;
  bool four_stage = false;
};

void validate(const Design& design);

struct Thresholds {
  double b;
  double b_tilde;
  double c;
};

void validate(const Thresholds& thresholds);

// m v {M ^ ceil((1 + rho_m) n_opt(theta_hat))}. The four-stage design uses u2
// in place of u1.
std::size_t stage2_size(const Design& design, double theta_hat_m);
// n2 v {M' ^ ceil((1 + rho_m) n~(theta_hat))}; equals M~ when M~ = M.
std::size_t stage3_size(const Design& design, std::size_t n2, double theta_hat_n2);

// Final sample size: M (three-stage) or M~ (four-stage).
std::size_t final_size(const Design& design);

enum class Trigger { interim_reject, futility, final_test };

struct StageOutcome {
  int stage = 0;
  std::size_t n_total = 0;
  bool reject = false;
  Trigger trigger = Trigger::final_test;
};

std::string trigger_name(Trigger t);

// Sample sizes and MLEs at every look of one path, regardless of stopping.
// The last look is always at final_size(design).
struct Path {
  std::vector<std::size_t> n;
  std::vector<double> theta_hat;
};

// Builds the look schedule from a data sequence of length >= final_size.
Path build_path(const Design& design, std::span<const double> xs);

// Applies the stopping rules to a path.
StageOutcome decide(const Design& design, const Thresholds& thresholds, const Path& path);

// Runs the design on data; throws DataError if xs is too short for the
// looks the data call for.
StageOutcome run_three_stage(const Design& design, const Thresholds& thresholds,
                             std::span<const double> xs);
StageOutcome run_four_stage(const Design& design, const Thresholds& thresholds,
                            std::span<const double> xs);

enum class CalibrationMethod { monte_carlo, normal_approx };

struct CalibrationSettings {
  CalibrationMethod method = CalibrationMethod::monte_carlo;
  std::size_t reps = 20000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // Normal approximation: points per stage over +-grid_sd standard deviations.
  std::size_t grid_points = 512;
  double grid_sd = 8.0;
};

struct CalibrationReport {
  Thresholds thresholds;
  // Achieved probabilities of the three defining events (with MC standard
  // errors; zero for the normal approximation).
  double p_futility;
  double p_interim_reject;
  double p_final_reject;
  double se_futility = 0.0;
  double se_interim_reject = 0.0;
  double se_final_reject = 0.0;
};

// Solves for b~, then b, then c.
CalibrationReport calibrate_thresholds(const Design& design, const CalibrationSettings& settings);

// Monte Carlo paths under theta; replication r uses Rng(seed, r, stream).
std::vector<Path> simulate_paths(const Design& design, double theta, std::size_t reps,
                                 std::uint64_t seed, std::uint64_t stream, std::size_t workers);

struct EventProbabilities {
  double futility_any;     // counterfactual futility at some interim look
  double interim_reject;   // actual rejection at an interim look
  double final_reject;     // reached the final look and rejected
  double reject;           // interim_reject + final_reject
  double futility_stop;    // actual futility stop
};

EventProbabilities event_probabilities(const Design& design, const Thresholds& thresholds,
                                       std::span<const Path> paths);

struct OperatingPoint {
  double theta;
  double power;
  double power_se;
  double mean_n;
  double mean_n_se;
  std::vector<double> stage_freq;  // fraction stopping at stage 1..k
  std::size_t reps;
};

std::vector<OperatingPoint> operating_characteristics(const Design& design,
                                                      const Thresholds& thresholds,
                                                      std::span<const double> thetas,
                                                      std::size_t reps, std::uint64_t seed,
                                                      std::size_t workers = 1);

// Group-sequential 2-SPRT at theta with group sizes n_1 < ... < n_k.
StageOutcome run_group_2sprt(const expfam::Family& family, double theta, double theta0,
                             double theta1, double b, double b_tilde,
                             std::span<const std::size_t> groups, std::span<const double> xs);

struct Thma1Reference {
  std::size_t nu;  // 1-based
  double m_ab;
};

Thma1Reference thma1_reference(std::span<const std::size_t> groups, double alpha, double beta,
                               double theta, const expfam::Family& family, double theta0,
                               double theta1, double eps);

}  // namespace seqlab::groupseq
