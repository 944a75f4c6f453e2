#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snm/errors.hpp"
#include "snm/samplers.hpp"

namespace snm {

using StateFn = std::function<double(const Eigen::VectorXd&)>;

// An ODE system whose target equation is a linear combination of known
// functions of the state: x_target' = sum_j beta_j h_j(x).
//
// Fitting only needs p, b, target_index and the regressors. Simulation
// additionally needs rhs, x0 and a complete parameter set; built-in systems
// with unspecified parameters list them in `missing` and refuse to simulate
// until the caller supplies values.
struct OdeModelSpec {
  std::string name;
  int p = 0;            // state dimension
  int b = 0;            // number of target-equation parameters
  int target_index = 0; // 0-based component whose equation is inferred
  std::vector<StateFn> regressors;                             // b entries
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rhs;  // simulation
  Eigen::VectorXd x0;           // initial state used for simulation
  Eigen::VectorXd target_beta;  // true target-equation parameters
  std::vector<std::string> missing;  // unset simulation parameters

  bool can_simulate() const { return rhs && missing.empty(); }
};

struct Dataset {
  Eigen::VectorXd times;                 // n, strictly increasing
  Eigen::MatrixXd y;                     // n x p noisy observations
  std::optional<Eigen::MatrixXd> truth;  // n x p noise-free trajectory
  Eigen::VectorXd noise_sd;              // p; empty when unknown

  Eigen::Index n() const { return y.rows(); }
  Eigen::Index p() const { return y.cols(); }
  void validate() const;
};

enum class NoiseMode { snr, prop_of_mean };

// Classical fixed-step RK4 on `substeps` uniform sub-steps per observation
// interval; returns the trajectory at the observation times.
Eigen::MatrixXd rk4_solve(const OdeModelSpec& spec, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& times, int substeps = 20);

// Entry (i,j) = h_j(states.row(i)).
Eigen::MatrixXd eval_regressors(const OdeModelSpec& spec,
                                const Eigen::MatrixXd& states);

// Perturb a trajectory with iid Gaussian noise. level is per component
// (a single entry broadcasts): snr sets sd_k = sample_sd(x_k)/level_k,
// prop_of_mean sets sd_k = level_k * mean(|x_k|).
Dataset inject_noise(const Eigen::VectorXd& times,
                     const Eigen::MatrixXd& trajectory, NoiseMode mode,
                     const Eigen::VectorXd& level, RngStream& rng);

// Max deviation |target rhs - sum_j beta_j h_j(x)| over random states; used
// to confirm a spec really is linear in its target parameters.
double linearity_gap(const OdeModelSpec& spec, RngStream& rng, int trials);

// ---- Built-in system registry ----

std::vector<std::string> builtin_systems();

// Construct a built-in system; params overrides/completes the simulation
// parameter set, keyed by name (e.g. "beta3", "xi2"; FitzHugh-Nagumo takes
// "a", "b", "c"). Unknown names are rejected.
OdeModelSpec make_system(const std::string& name,
                         const std::map<std::string, double>& params = {});

// Per-system default interior knot count for the smoothing step.
int default_knots(const std::string& name);

}  // namespace snm
