#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snm/ode_systems.hpp"
#include "snm/quadrature.hpp"
#include "snm/samplers.hpp"
#include "snm/spline_basis.hpp"

namespace snm {

// Gamma prior shape/rate for the spline penalties (per component) and for
// the ridge penalty. An empty vector broadcasts the 0.01 default; a single
// entry broadcasts that value. The defaults put prior mean 1 and variance
// 100 on every lambda, leaning towards light smoothing.
struct HyperParams {
  Eigen::VectorXd alpha_theta;
  Eigen::VectorXd gamma_theta;
  double alpha_beta = 0.01;
  double gamma_beta = 0.01;

  Eigen::VectorXd resolved_alpha_theta(int p) const;
  Eigen::VectorXd resolved_gamma_theta(int p) const;
  void validate(int p) const;
};

// Everything sampled at one iteration. sigma2[target] is the shared
// nuisance variance carrying both smoothing and matching residuals.
struct ChainState {
  std::vector<Eigen::VectorXd> theta;  // p coefficient vectors, each q_k+2
  Eigen::VectorXd lambda_theta;        // p
  Eigen::VectorXd sigma2;              // p
  Eigen::VectorXd beta;                // b
  double lambda_beta = 1.0;
  double xi = 0.0;
};

struct FitConfig {
  int iterations = 10000;
  int burn_in = 5000;
  int thin = 1;
  std::vector<int> knots;  // per component; empty or single entry broadcasts
  HyperParams hyper;
  int refine = 1;          // quadrature grid refinement for H
  std::uint64_t seed = 0;

  void validate() const;
};

// Recorded (thinned) states plus the context needed to rebuild the derived
// curves x_k = Psi_k theta_k and xi + H beta for any stored iteration.
struct Chains {
  std::vector<int> iterations;  // raw 1-based iteration of each record
  std::vector<ChainState> states;
  Eigen::VectorXd times;
  std::vector<SplineWorkspace> workspaces;
  OdeModelSpec model;
  FitConfig config;
  long rate_floor_events = 0;

  std::size_t size() const { return states.size(); }
  Eigen::VectorXd smoothed_curve(int k, std::size_t record) const;
  Eigen::VectorXd reconstructed_curve(std::size_t record) const;
};

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};
using PosteriorSummary = std::vector<ParamSummary>;

// The two-step Gibbs sampler. The smooth step draws the spline coefficients
// for every component from conditionals that ignore the integral solution;
// the match step rebuilds the design matrix from the freshly smoothed
// components and draws the regression block.
class SnmSampler {
 public:
  SnmSampler(Dataset data, OdeModelSpec model, FitConfig config);

  const Dataset& data() const { return data_; }
  const OdeModelSpec& model() const { return model_; }
  const FitConfig& config() const { return cfg_; }
  const std::vector<SplineWorkspace>& workspaces() const { return ws_; }
  long rate_floor_events() const { return rate_floor_events_; }

  // Penalized least squares warm start: theta from (Psi'Psi + S)^{-1} Psi'y,
  // sigma2 from the residuals, beta zero, xi the first target observation.
  ChainState init_state() const;

  // Full conditionals, one draw each, no state mutation.
  Eigen::VectorXd draw_theta(int k, const ChainState& s, RngStream& rng) const;
  double draw_lambda_theta(int k, const ChainState& s, RngStream& rng) const;
  double draw_sigma2(int k, const ChainState& s, RngStream& rng) const;
  Eigen::VectorXd draw_beta(const ChainState& s, const DesignMatrix& design,
                            RngStream& rng) const;
  double draw_xi(const ChainState& s, const DesignMatrix& design,
                 RngStream& rng) const;
  double draw_lambda_beta(const ChainState& s, RngStream& rng) const;
  double draw_sigma2_target(const ChainState& s, const DesignMatrix& design,
                            RngStream& rng) const;

  // Precision and linear term of the beta conditional; the conditional mean
  // is the Tikhonov/ridge solution of this system.
  std::pair<Eigen::MatrixXd, Eigen::VectorXd> beta_precision_system(
      const ChainState& s, const DesignMatrix& design) const;

  // theta_k, lambda_theta_k and (off-target) sigma2_k for every component,
  // each component consuming its own stream. The update order across
  // components is irrelevant by construction; tests may permute it.
  void smooth_step(ChainState& s, std::span<RngStream> comp_streams) const;
  void smooth_step(ChainState& s, std::span<RngStream> comp_streams,
                   std::span<const int> order) const;

  // Rebuild H from the current smoothed components, then draw beta, xi,
  // lambda_beta and the shared sigma2 in that order.
  void match_step(ChainState& s, RngStream& rng) const;

  // Design matrix integrated over the current smoothed components.
  DesignMatrix current_design(const ChainState& s) const;

  Chains run() const;

 private:
  Eigen::VectorXd smoothed_component(int k, const ChainState& s) const;

  Dataset data_;
  OdeModelSpec model_;
  FitConfig cfg_;
  std::vector<SplineWorkspace> ws_;
  std::vector<Eigen::MatrixXd> gram_;  // Psi_k' Psi_k
  std::vector<Eigen::VectorXd> proj_;  // Psi_k' y_k
  Eigen::VectorXd alpha_theta_, gamma_theta_;
  mutable long rate_floor_events_ = 0;
};

// Substream indices of the harness; kept distinct so no two consumers of a
// derived seed ever collide.
inline constexpr std::uint64_t kMatchStream = 0;
inline constexpr std::uint64_t kComponentStreamBase = 1;
inline constexpr std::uint64_t kNoiseStream = 1ull << 20;

PosteriorSummary posterior_summary(const Chains& chains, int burn_in);

// Names and values of every scalar tracked by the chain, in a fixed order:
// xi{t}, beta*, sigma2_*, lambda_theta_*, lambda_beta, theta{k}_{h}.
std::vector<std::string> chain_param_names(const Chains& chains);
Eigen::VectorXd chain_param_values(const Chains& chains, const ChainState& s);

// Plug-in posterior-mean curves: the smoothed target component and the
// reconstructed solution xi + H beta with H built from the posterior-mean
// smoothed components.
struct PosteriorCurves {
  Eigen::VectorXd smoothed;
  Eigen::VectorXd reconstructed;
};
PosteriorCurves posterior_curves(const Chains& chains, int burn_in);

// mean, sd, 2.5% and 97.5% quantiles of a sample (type-7 quantiles).
ParamSummary summary_stats(std::string name, const std::vector<double>& values);

}  // namespace snm
