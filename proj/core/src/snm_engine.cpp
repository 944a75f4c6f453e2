#include "snm/snm_engine.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

namespace snm {

namespace {

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, int p, double fallback,
                          const char* what) {
  if (v.size() == 0) return Eigen::VectorXd::Constant(p, fallback);
  if (v.size() == 1) return Eigen::VectorXd::Constant(p, v[0]);
  if (v.size() == p) return v;
  std::ostringstream msg;
  msg << what << ": expected 1 or " << p << " entries, got " << v.size();
  throw invalid_input(msg.str());
}

}  // namespace

Eigen::VectorXd HyperParams::resolved_alpha_theta(int p) const {
  return broadcast(alpha_theta, p, 0.01, "alpha_theta");
}

Eigen::VectorXd HyperParams::resolved_gamma_theta(int p) const {
  return broadcast(gamma_theta, p, 0.01, "gamma_theta");
}

void HyperParams::validate(int p) const {
  if (!(alpha_beta > 0.0) || !(gamma_beta > 0.0)) {
    throw invalid_input("hyperparameters must be strictly positive");
  }
  const Eigen::VectorXd a = resolved_alpha_theta(p);
  const Eigen::VectorXd g = resolved_gamma_theta(p);
  if (!(a.minCoeff() > 0.0) || !(g.minCoeff() > 0.0)) {
    throw invalid_input("hyperparameters must be strictly positive");
  }
}

void FitConfig::validate() const {
  if (iterations < 1) throw invalid_input("iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) {
    throw invalid_input("burn_in must lie in [0, iterations)");
  }
  if (thin < 1) throw invalid_input("thin must be >= 1");
  if (refine < 1) throw invalid_input("refine must be >= 1");
}

SnmSampler::SnmSampler(Dataset data, OdeModelSpec model, FitConfig config)
    : data_(std::move(data)), model_(std::move(model)), cfg_(std::move(config)) {
  data_.validate();
  cfg_.validate();
  if (data_.p() != model_.p) {
    std::ostringstream msg;
    msg << "dataset has " << data_.p() << " components but the system expects "
        << model_.p;
    throw invalid_input(msg.str());
  }
  if (model_.target_index < 0 || model_.target_index >= model_.p) {
    throw invalid_input("target component out of range");
  }
  if (static_cast<int>(model_.regressors.size()) != model_.b || model_.b < 1) {
    throw invalid_input("system must define b >= 1 regressors");
  }
  cfg_.hyper.validate(model_.p);
  alpha_theta_ = cfg_.hyper.resolved_alpha_theta(model_.p);
  gamma_theta_ = cfg_.hyper.resolved_gamma_theta(model_.p);

  std::vector<int> knots = cfg_.knots;
  if (knots.empty()) knots.assign(model_.p, default_knots(model_.name));
  if (knots.size() == 1) knots.assign(model_.p, knots[0]);
  if (static_cast<int>(knots.size()) != model_.p) {
    throw invalid_input("knot counts: expected one entry per component");
  }
  cfg_.knots = knots;

  ws_.reserve(model_.p);
  gram_.reserve(model_.p);
  proj_.reserve(model_.p);
  for (int k = 0; k < model_.p; ++k) {
    ws_.push_back(make_workspace(data_.times, knots[k]));
    gram_.push_back(ws_[k].basis.transpose() * ws_[k].basis);
    proj_.push_back(ws_[k].basis.transpose() * data_.y.col(k));
  }
}

ChainState SnmSampler::init_state() const {
  const int p = model_.p;
  const auto n = data_.n();
  ChainState s;
  s.theta.resize(p);
  s.lambda_theta = Eigen::VectorXd::Ones(p);
  s.sigma2.resize(p);
  for (int k = 0; k < p; ++k) {
    const Eigen::MatrixXd system = gram_[k] + ws_[k].penalty;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      std::ostringstream msg;
      msg << "initialization system singular for component " << k + 1;
      throw numerical_error(msg.str());
    }
    s.theta[k] = ldlt.solve(proj_[k]);
    const double rss =
        (data_.y.col(k) - ws_[k].basis * s.theta[k]).squaredNorm();
    s.sigma2[k] = std::max(rss / static_cast<double>(n), 1e-8);
  }
  s.beta = Eigen::VectorXd::Zero(model_.b);
  s.lambda_beta = 1.0;
  s.xi = data_.y(0, model_.target_index);
  return s;
}

Eigen::VectorXd SnmSampler::smoothed_component(int k,
                                               const ChainState& s) const {
  return ws_[k].basis * s.theta[k];
}

Eigen::VectorXd SnmSampler::draw_theta(int k, const ChainState& s,
                                       RngStream& rng) const {
  const Eigen::MatrixXd precision =
      ws_[k].penalty * s.lambda_theta[k] + gram_[k] / s.sigma2[k];
  const Eigen::VectorXd linear = proj_[k] / s.sigma2[k];
  return mvn_precision_draw(precision, linear, rng);
}

double SnmSampler::draw_lambda_theta(int k, const ChainState& s,
                                     RngStream& rng) const {
  const int q = ws_[k].knots.size();
  const double quad =
      std::max(0.0, s.theta[k].dot(ws_[k].penalty * s.theta[k]));
  const double shape = 0.5 * (q + 2) + alpha_theta_[k];
  const double rate = 0.5 * quad + gamma_theta_[k];
  return gamma_draw(shape, rate, rng);
}

double SnmSampler::draw_sigma2(int k, const ChainState& s,
                               RngStream& rng) const {
  if (k == model_.target_index) {
    throw invalid_input("draw_sigma2 is for off-target components only");
  }
  const double rss = (data_.y.col(k) - smoothed_component(k, s)).squaredNorm();
  double rate = 0.5 * rss;
  if (rate < 1e-12) {
    rate = 1e-12;
    if (rate_floor_events_++ == 0) {
      std::cerr << "snm: zero smoothing residual, rate floored at 1e-12\n";
    }
  }
  return inv_gamma_draw(0.5 * static_cast<double>(data_.n()), rate, rng);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> SnmSampler::beta_precision_system(
    const ChainState& s, const DesignMatrix& design) const {
  const int t = model_.target_index;
  const double sigma2 = s.sigma2[t];
  const Eigen::VectorXd resid =
      data_.y.col(t).array() - s.xi;  // y_star minus xi * 1
  Eigen::MatrixXd precision =
      (design.H.transpose() * design.H) / sigma2;
  precision.diagonal().array() += s.lambda_beta;
  const Eigen::VectorXd linear = design.H.transpose() * resid / sigma2;
  return {precision, linear};
}

Eigen::VectorXd SnmSampler::draw_beta(const ChainState& s,
                                      const DesignMatrix& design,
                                      RngStream& rng) const {
  const auto [precision, linear] = beta_precision_system(s, design);
  return mvn_precision_draw(precision, linear, rng);
}

double SnmSampler::draw_xi(const ChainState& s, const DesignMatrix& design,
                           RngStream& rng) const {
  const int t = model_.target_index;
  const double mean = data_.y(0, t) - design.H.row(0).dot(s.beta);
  return mean + std::sqrt(s.sigma2[t]) * rng.normal();
}

double SnmSampler::draw_lambda_beta(const ChainState& s,
                                    RngStream& rng) const {
  const double shape = 0.5 * model_.b + cfg_.hyper.alpha_beta;
  const double rate = 0.5 * s.beta.squaredNorm() + cfg_.hyper.gamma_beta;
  return gamma_draw(shape, rate, rng);
}

double SnmSampler::draw_sigma2_target(const ChainState& s,
                                      const DesignMatrix& design,
                                      RngStream& rng) const {
  const int t = model_.target_index;
  const Eigen::VectorXd resid = data_.y.col(t).array() - s.xi;
  const double match_rss = (resid - design.H * s.beta).squaredNorm();
  const double smooth_rss =
      (data_.y.col(t) - smoothed_component(t, s)).squaredNorm();
  double rate = 0.5 * match_rss + 0.5 * smooth_rss;
  if (rate < 1e-12) {
    rate = 1e-12;
    if (rate_floor_events_++ == 0) {
      std::cerr << "snm: zero combined residual, rate floored at 1e-12\n";
    }
  }
  return inv_gamma_draw(static_cast<double>(data_.n()), rate, rng);
}

DesignMatrix SnmSampler::current_design(const ChainState& s) const {
  Eigen::MatrixXd smoothed(data_.n(), model_.p);
  for (int k = 0; k < model_.p; ++k) {
    smoothed.col(k) = smoothed_component(k, s);
  }
  const auto eval = [this](const Eigen::MatrixXd& states) {
    return eval_regressors(model_, states);
  };
  return build_design(smoothed, eval, data_.times, cfg_.refine);
}

void SnmSampler::smooth_step(ChainState& s,
                             std::span<RngStream> comp_streams) const {
  std::vector<int> order(model_.p);
  std::iota(order.begin(), order.end(), 0);
  smooth_step(s, comp_streams, order);
}

void SnmSampler::smooth_step(ChainState& s, std::span<RngStream> comp_streams,
                             std::span<const int> order) const {
  if (comp_streams.size() != static_cast<std::size_t>(model_.p)) {
    throw invalid_input("smooth_step: one stream per component required");
  }
  for (const int k : order) {
    s.theta[k] = draw_theta(k, s, comp_streams[k]);
    s.lambda_theta[k] = draw_lambda_theta(k, s, comp_streams[k]);
    if (k != model_.target_index) {
      s.sigma2[k] = draw_sigma2(k, s, comp_streams[k]);
    }
  }
}

void SnmSampler::match_step(ChainState& s, RngStream& rng) const {
  const DesignMatrix design = current_design(s);
  s.beta = draw_beta(s, design, rng);
  s.xi = draw_xi(s, design, rng);
  s.lambda_beta = draw_lambda_beta(s, rng);
  s.sigma2[model_.target_index] = draw_sigma2_target(s, design, rng);
}

Chains SnmSampler::run() const {
  const RngStream master(cfg_.seed);
  RngStream match_rng = master.substream(kMatchStream);
  std::vector<RngStream> comp_streams;
  comp_streams.reserve(model_.p);
  for (int k = 0; k < model_.p; ++k) {
    comp_streams.push_back(master.substream(kComponentStreamBase + k));
  }

  Chains chains;
  chains.times = data_.times;
  chains.workspaces = ws_;
  chains.model = model_;
  chains.config = cfg_;
  chains.iterations.reserve(cfg_.iterations / cfg_.thin);
  chains.states.reserve(cfg_.iterations / cfg_.thin);

  ChainState state = init_state();
  for (int iter = 1; iter <= cfg_.iterations; ++iter) {
    try {
      smooth_step(state, comp_streams);
      match_step(state, match_rng);
    } catch (const numerical_error& err) {
      std::ostringstream msg;
      msg << "iteration " << iter << ": " << err.what();
      throw numerical_error(msg.str());
    }
    if (iter % cfg_.thin == 0) {
      chains.iterations.push_back(iter);
      chains.states.push_back(state);
    }
  }
  chains.rate_floor_events = rate_floor_events_;
  return chains;
}

Eigen::VectorXd Chains::smoothed_curve(int k, std::size_t record) const {
  return workspaces.at(k).basis * states.at(record).theta.at(k);
}

Eigen::VectorXd Chains::reconstructed_curve(std::size_t record) const {
  const ChainState& s = states.at(record);
  Eigen::MatrixXd smoothed(times.size(), model.p);
  for (int k = 0; k < model.p; ++k) {
    smoothed.col(k) = workspaces[k].basis * s.theta[k];
  }
  const auto eval = [this](const Eigen::MatrixXd& st) {
    return eval_regressors(model, st);
  };
  const DesignMatrix design = build_design(smoothed, eval, times, config.refine);
  return (design.H * s.beta).array() + s.xi;
}

std::vector<std::string> chain_param_names(const Chains& chains) {
  const int t = chains.model.target_index;
  std::vector<std::string> names;
  names.push_back("xi" + std::to_string(t + 1));
  for (int j = 0; j < chains.model.b; ++j) {
    names.push_back("beta" + std::to_string(j + 1));
  }
  for (int k = 0; k < chains.model.p; ++k) {
    names.push_back("sigma2_" + std::to_string(k + 1));
  }
  for (int k = 0; k < chains.model.p; ++k) {
    names.push_back("lambda_theta_" + std::to_string(k + 1));
  }
  names.push_back("lambda_beta");
  for (int k = 0; k < chains.model.p; ++k) {
    const auto q2 = chains.workspaces[k].basis.cols();
    for (Eigen::Index h = 0; h < q2; ++h) {
      names.push_back("theta" + std::to_string(k + 1) + "_" +
                      std::to_string(h + 1));
    }
  }
  return names;
}

Eigen::VectorXd chain_param_values(const Chains& chains, const ChainState& s) {
  std::vector<double> vals;
  vals.push_back(s.xi);
  for (Eigen::Index j = 0; j < s.beta.size(); ++j) vals.push_back(s.beta[j]);
  for (Eigen::Index k = 0; k < s.sigma2.size(); ++k) vals.push_back(s.sigma2[k]);
  for (Eigen::Index k = 0; k < s.lambda_theta.size(); ++k) {
    vals.push_back(s.lambda_theta[k]);
  }
  vals.push_back(s.lambda_beta);
  for (const auto& theta : s.theta) {
    for (Eigen::Index h = 0; h < theta.size(); ++h) vals.push_back(theta[h]);
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

ParamSummary summary_stats(std::string name, const std::vector<double>& values) {
  if (values.empty()) throw invalid_input("summary_stats: empty sample");
  ParamSummary out;
  out.name = std::move(name);
  const auto n = values.size();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / n;
  out.mean = mean;
  if (n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    out.sd = std::sqrt(ss / (n - 1));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&sorted](double prob) {
    const double h = prob * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double w = h - lo;
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  out.q025 = quantile(0.025);
  out.q975 = quantile(0.975);
  return out;
}

namespace {

std::vector<std::size_t> records_after(const Chains& chains, int burn_in) {
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < chains.size(); ++r) {
    if (chains.iterations[r] > burn_in) kept.push_back(r);
  }
  if (kept.empty()) {
    throw invalid_input("no recorded iterations beyond the burn-in");
  }
  return kept;
}

}  // namespace

PosteriorSummary posterior_summary(const Chains& chains, int burn_in) {
  const auto kept = records_after(chains, burn_in);
  const auto names = chain_param_names(chains);
  std::vector<std::vector<double>> samples(names.size());
  for (auto& s : samples) s.reserve(kept.size());
  for (const auto r : kept) {
    const Eigen::VectorXd vals = chain_param_values(chains, chains.states[r]);
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      samples[i].push_back(vals[i]);
    }
  }
  PosteriorSummary out;
  out.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.push_back(summary_stats(names[i], samples[i]));
  }
  return out;
}

PosteriorCurves posterior_curves(const Chains& chains, int burn_in) {
  const auto kept = records_after(chains, burn_in);
  const int p = chains.model.p;
  const double m = static_cast<double>(kept.size());

  std::vector<Eigen::VectorXd> theta_mean(p);
  for (int k = 0; k < p; ++k) {
    theta_mean[k] =
        Eigen::VectorXd::Zero(chains.workspaces[k].basis.cols());
  }
  Eigen::VectorXd beta_mean = Eigen::VectorXd::Zero(chains.model.b);
  double xi_mean = 0.0;
  for (const auto r : kept) {
    const ChainState& s = chains.states[r];
    for (int k = 0; k < p; ++k) theta_mean[k] += s.theta[k];
    beta_mean += s.beta;
    xi_mean += s.xi;
  }
  for (int k = 0; k < p; ++k) theta_mean[k] /= m;
  beta_mean /= m;
  xi_mean /= m;

  Eigen::MatrixXd smoothed(chains.times.size(), p);
  for (int k = 0; k < p; ++k) {
    smoothed.col(k) = chains.workspaces[k].basis * theta_mean[k];
  }
  const auto eval = [&chains](const Eigen::MatrixXd& st) {
    return eval_regressors(chains.model, st);
  };
  const DesignMatrix design =
      build_design(smoothed, eval, chains.times, chains.config.refine);

  PosteriorCurves curves;
  curves.smoothed = smoothed.col(chains.model.target_index);
  curves.reconstructed = (design.H * beta_mean).array() + xi_mean;
  return curves;
}

}  // namespace snm
