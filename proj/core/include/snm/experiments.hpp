#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "snm/ode_systems.hpp"
#include "snm/snm_engine.hpp"

namespace snm {

enum class GridKind { unit_interval, lv_25, lv_100, lv_500, range };

GridKind parse_grid_kind(const std::string& name);
std::string grid_kind_name(GridKind kind);

// Observation grids used by the built-in scenarios. n is honored by
// unit_interval, lv_500 and range; t0/t1 only by range.
Eigen::VectorXd time_grid(GridKind kind, int n = 0, double t0 = 0.0,
                          double t1 = 1.0);

struct Scenario {
  std::string system;
  std::map<std::string, double> sim_params;
  GridKind grid = GridKind::unit_interval;
  int n = 100;
  double t0 = 0.0;
  double t1 = 1.0;
  NoiseMode noise_mode = NoiseMode::snr;
  Eigen::VectorXd noise_level;  // scalar broadcasts across components
  int replicates = 100;
  FitConfig fit;
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 picks the hardware concurrency
  int rk4_substeps = 20;
};

struct ReplicateResult {
  int index = 0;
  bool ok = false;
  std::string error;
  Eigen::VectorXd post_mean;  // xi then betas
  double sigma2_target = 0.0;
  double mse_x = 0.0;  // smoothed target curve vs truth
  double mse_g = 0.0;  // reconstructed solution vs truth
};

struct ScenarioSummary {
  std::vector<std::string> params;  // xi{t}, beta1..b
  Eigen::VectorXd truth;
  Eigen::VectorXd avg_post_mean;
  Eigen::VectorXd mse;  // mean over replicates of (post mean - truth)^2
  double avg_sigma2_target = 0.0;
  double avg_mse_x = 0.0;
  double avg_mse_g = 0.0;
  int replicates_requested = 0;
  int replicates_used = 0;
  int failed = 0;
  std::vector<ReplicateResult> replicate_results;
};

double curve_mse(const Eigen::VectorXd& curve, const Eigen::VectorXd& truth);

// Average over the surviving replicates; failures are excluded and counted.
ScenarioSummary aggregate_replicates(std::vector<std::string> params,
                                     Eigen::VectorXd truth,
                                     std::vector<ReplicateResult> results);

// Simulate once, then perturb/fit/summarize R times in parallel, each
// replicate on the derived stream base_seed ^ splitmix64(r).
ScenarioSummary run_scenario(const Scenario& scenario);

// One replicate, exactly as run_scenario would execute it.
ReplicateResult run_replicate(const Scenario& scenario,
                              const OdeModelSpec& model,
                              const Eigen::VectorXd& times,
                              const Eigen::MatrixXd& truth_traj, int r);

}  // namespace snm
