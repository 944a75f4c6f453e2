#include "snm/experiments.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace snm {

GridKind parse_grid_kind(const std::string& name) {
  if (name == "unit_interval") return GridKind::unit_interval;
  if (name == "lv_25") return GridKind::lv_25;
  if (name == "lv_100") return GridKind::lv_100;
  if (name == "lv_500") return GridKind::lv_500;
  if (name == "range") return GridKind::range;
  throw invalid_input("unknown grid kind '" + name + "'");
}

std::string grid_kind_name(GridKind kind) {
  switch (kind) {
    case GridKind::unit_interval: return "unit_interval";
    case GridKind::lv_25: return "lv_25";
    case GridKind::lv_100: return "lv_100";
    case GridKind::lv_500: return "lv_500";
    case GridKind::range: return "range";
  }
  throw invalid_input("unknown grid kind");
}

namespace {

Eigen::VectorXd even_grid(int n, double t0, double t1) {
  if (n < 3) throw invalid_input("time_grid: need at least 3 points");
  if (!(t1 > t0)) throw invalid_input("time_grid: t1 must exceed t0");
  Eigen::VectorXd times(n);
  const double step = (t1 - t0) / (n - 1);
  for (int i = 0; i < n; ++i) times[i] = t0 + i * step;
  times[n - 1] = t1;
  return times;
}

}  // namespace

Eigen::VectorXd time_grid(GridKind kind, int n, double t0, double t1) {
  switch (kind) {
    case GridKind::unit_interval: return even_grid(n, 0.0, 1.0);
    case GridKind::lv_25: return even_grid(25, 0.0, 24.0);
    case GridKind::lv_100: return even_grid(100, 0.0, 99.0);
    case GridKind::lv_500: return even_grid(n > 0 ? n : 500, 0.0, 99.0);
    case GridKind::range: return even_grid(n, t0, t1);
  }
  throw invalid_input("unknown grid kind");
}

double curve_mse(const Eigen::VectorXd& curve, const Eigen::VectorXd& truth) {
  if (curve.size() != truth.size() || curve.size() == 0) {
    throw invalid_input("curve_mse: length mismatch");
  }
  return (curve - truth).squaredNorm() / static_cast<double>(curve.size());
}

ReplicateResult run_replicate(const Scenario& scenario,
                              const OdeModelSpec& model,
                              const Eigen::VectorXd& times,
                              const Eigen::MatrixXd& truth_traj, int r) {
  ReplicateResult res;
  res.index = r;
  try {
    const RngStream rep_stream =
        RngStream(scenario.base_seed).substream(static_cast<std::uint64_t>(r));
    RngStream noise_rng = rep_stream.substream(kNoiseStream);
    const Dataset ds = inject_noise(times, truth_traj, scenario.noise_mode,
                                    scenario.noise_level, noise_rng);
    FitConfig fit = scenario.fit;
    fit.seed = rep_stream.seed();
    const SnmSampler sampler(ds, model, fit);
    const Chains chains = sampler.run();

    const auto kept_summary = posterior_summary(chains, fit.burn_in);
    // xi, betas, sigma2_target in the fixed parameter order.
    res.post_mean.resize(1 + model.b);
    res.post_mean[0] = kept_summary[0].mean;
    for (int j = 0; j < model.b; ++j) {
      res.post_mean[1 + j] = kept_summary[1 + j].mean;
    }
    res.sigma2_target = kept_summary[1 + model.b + model.target_index].mean;

    const PosteriorCurves curves = posterior_curves(chains, fit.burn_in);
    const Eigen::VectorXd truth_col = truth_traj.col(model.target_index);
    res.mse_x = curve_mse(curves.smoothed, truth_col);
    res.mse_g = curve_mse(curves.reconstructed, truth_col);
    res.ok = true;
  } catch (const std::exception& err) {
    res.ok = false;
    res.error = err.what();
  }
  return res;
}

ScenarioSummary aggregate_replicates(std::vector<std::string> params,
                                     Eigen::VectorXd truth,
                                     std::vector<ReplicateResult> results) {
  ScenarioSummary summary;
  summary.params = std::move(params);
  summary.truth = std::move(truth);
  summary.replicates_requested = static_cast<int>(results.size());

  const auto d = summary.truth.size();
  summary.avg_post_mean = Eigen::VectorXd::Zero(d);
  summary.mse = Eigen::VectorXd::Zero(d);
  int used = 0;
  for (const auto& res : results) {
    if (!res.ok) continue;
    if (res.post_mean.size() != d) {
      throw invalid_input("aggregate_replicates: result width mismatch");
    }
    ++used;
    summary.avg_post_mean += res.post_mean;
    summary.mse +=
        (res.post_mean - summary.truth).array().square().matrix();
    summary.avg_sigma2_target += res.sigma2_target;
    summary.avg_mse_x += res.mse_x;
    summary.avg_mse_g += res.mse_g;
  }
  summary.replicates_used = used;
  summary.failed = summary.replicates_requested - used;
  if (used == 0) {
    throw numerical_error("all replicates failed; first error: " +
                          (results.empty() ? std::string("none")
                                           : results.front().error));
  }
  summary.avg_post_mean /= used;
  summary.mse /= used;
  summary.avg_sigma2_target /= used;
  summary.avg_mse_x /= used;
  summary.avg_mse_g /= used;
  summary.replicate_results = std::move(results);
  return summary;
}

ScenarioSummary run_scenario(const Scenario& scenario) {
  if (scenario.replicates < 1) {
    throw invalid_input("scenario: replicates must be >= 1");
  }
  const OdeModelSpec model = make_system(scenario.system, scenario.sim_params);
  if (!model.can_simulate()) {
    std::ostringstream msg;
    msg << "scenario: simulation parameters not set:";
    for (const auto& m : model.missing) msg << " " << m;
    throw invalid_input(msg.str());
  }
  if (scenario.noise_level.size() == 0) {
    throw invalid_input("scenario: noise level required");
  }
  const Eigen::VectorXd times =
      time_grid(scenario.grid, scenario.n, scenario.t0, scenario.t1);
  const Eigen::MatrixXd truth_traj =
      rk4_solve(model, model.x0, times, scenario.rk4_substeps);

  const int R = scenario.replicates;
  std::vector<ReplicateResult> results(R);
  int threads = scenario.threads > 0
                    ? scenario.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, R));

  std::atomic<int> next{1};
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r > R) return;
      results[r - 1] = run_replicate(scenario, model, times, truth_traj, r);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<std::string> params;
  params.push_back("xi" + std::to_string(model.target_index + 1));
  for (int j = 0; j < model.b; ++j) {
    params.push_back("beta" + std::to_string(j + 1));
  }
  Eigen::VectorXd truth(1 + model.b);
  truth[0] = model.x0[model.target_index];
  truth.tail(model.b) = model.target_beta;
  return aggregate_replicates(std::move(params), std::move(truth),
                              std::move(results));
}

}  // namespace snm
