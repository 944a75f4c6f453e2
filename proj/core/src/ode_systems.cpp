#include "snm/ode_systems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace snm {

void Dataset::validate() const {
  if (n() < 3) throw invalid_input("dataset: need at least 3 observations");
  if (times.size() != n()) throw invalid_input("dataset: times/rows mismatch");
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg << "dataset: times not strictly increasing at row " << i + 1;
      throw invalid_input(msg.str());
    }
  }
  if (!y.allFinite()) throw invalid_input("dataset: non-finite observation");
  if (truth && (truth->rows() != n() || truth->cols() != p())) {
    throw invalid_input("dataset: truth shape mismatch");
  }
}

Eigen::MatrixXd rk4_solve(const OdeModelSpec& spec, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& times, int substeps) {
  if (!spec.rhs) throw invalid_input("rk4_solve: system has no right-hand side");
  if (!spec.missing.empty()) {
    std::ostringstream msg;
    msg << "rk4_solve: simulation parameters not set:";
    for (const auto& m : spec.missing) msg << " " << m;
    throw invalid_input(msg.str());
  }
  const auto n = times.size();
  if (n < 2) throw invalid_input("rk4_solve: need at least 2 time points");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw invalid_input("rk4_solve: times not strictly increasing");
    }
  }
  if (substeps < 1) throw invalid_input("rk4_solve: substeps must be >= 1");
  if (x0.size() != spec.p) throw invalid_input("rk4_solve: x0 dimension mismatch");
  if (!spec.rhs(x0).allFinite()) {
    throw invalid_input("rk4_solve: rhs not finite at the initial state");
  }

  Eigen::MatrixXd traj(n, spec.p);
  Eigen::VectorXd x = x0;
  traj.row(0) = x.transpose();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = (times[i + 1] - times[i]) / substeps;
    for (int s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = spec.rhs(x);
      const Eigen::VectorXd k2 = spec.rhs(x + 0.5 * h * k1);
      const Eigen::VectorXd k3 = spec.rhs(x + 0.5 * h * k2);
      const Eigen::VectorXd k4 = spec.rhs(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite()) {
        std::ostringstream msg;
        msg << "rk4_solve: state diverged near t = "
            << times[i] + (s + 1) * h;
        throw numerical_error(msg.str());
      }
    }
    traj.row(i + 1) = x.transpose();
  }
  return traj;
}

Eigen::MatrixXd eval_regressors(const OdeModelSpec& spec,
                                const Eigen::MatrixXd& states) {
  if (states.cols() != spec.p) {
    throw invalid_input("eval_regressors: state matrix must have p columns");
  }
  const auto n = states.rows();
  Eigen::MatrixXd reg(n, spec.b);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd row = states.row(i).transpose();
    for (int j = 0; j < spec.b; ++j) {
      const double v = spec.regressors[j](row);
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "eval_regressors: h_" << j + 1 << " not finite at row " << i + 1;
        throw numerical_error(msg.str());
      }
      reg(i, j) = v;
    }
  }
  return reg;
}

Dataset inject_noise(const Eigen::VectorXd& times,
                     const Eigen::MatrixXd& trajectory, NoiseMode mode,
                     const Eigen::VectorXd& level, RngStream& rng) {
  const auto n = trajectory.rows();
  const auto p = trajectory.cols();
  if (times.size() != n) throw invalid_input("inject_noise: times/rows mismatch");
  if (!trajectory.allFinite()) {
    throw invalid_input("inject_noise: trajectory must be finite");
  }
  if (level.size() != 1 && level.size() != p) {
    throw invalid_input("inject_noise: level must be scalar or per component");
  }
  if (!(level.minCoeff() > 0.0)) {
    throw invalid_input("inject_noise: levels must be positive");
  }

  Dataset ds;
  ds.times = times;
  ds.truth = trajectory;
  ds.noise_sd.resize(p);
  ds.y.resize(n, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double lvl = level.size() == 1 ? level[0] : level[k];
    double sd = 0.0;
    if (mode == NoiseMode::snr) {
      const double mean = trajectory.col(k).mean();
      const double ss = (trajectory.col(k).array() - mean).square().sum();
      const double signal_sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (!(signal_sd > 0.0)) {
        std::ostringstream msg;
        msg << "inject_noise: component " << k + 1
            << " is constant; snr mode undefined";
        throw invalid_input(msg.str());
      }
      sd = signal_sd / lvl;
    } else {
      sd = lvl * trajectory.col(k).array().abs().mean();
    }
    ds.noise_sd[k] = sd;
    for (Eigen::Index i = 0; i < n; ++i) {
      ds.y(i, k) = trajectory(i, k) + sd * rng.normal();
    }
  }
  return ds;
}

double linearity_gap(const OdeModelSpec& spec, RngStream& rng, int trials) {
  if (!spec.can_simulate()) {
    throw invalid_input("linearity_gap: system cannot simulate");
  }
  double scale = 1.0;
  if (spec.x0.size() > 0) {
    scale = std::max(1.0, spec.x0.cwiseAbs().maxCoeff() * 1.5);
  }
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x(spec.p);
    for (int k = 0; k < spec.p; ++k) x[k] = (2.0 * rng.uniform() - 1.0) * scale;
    const double lhs = spec.rhs(x)[spec.target_index];
    double rhs = 0.0;
    for (int j = 0; j < spec.b; ++j) {
      rhs += spec.target_beta[j] * spec.regressors[j](x);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

namespace {

// Resolve defaults + user overrides against the system's parameter list.
// Parameters without a default stay missing until supplied.
class ParamTable {
 public:
  void add(const std::string& name, std::optional<double> def) {
    names_.push_back(name);
    defaults_[name] = def;
  }

  std::map<std::string, double> resolve(
      const std::string& system, const std::map<std::string, double>& user,
      std::vector<std::string>& missing) const {
    for (const auto& [key, _] : user) {
      if (defaults_.find(key) == defaults_.end()) {
        std::ostringstream msg;
        msg << "unknown parameter '" << key << "' for system " << system;
        throw invalid_input(msg.str());
      }
    }
    std::map<std::string, double> out;
    for (const auto& name : names_) {
      auto it = user.find(name);
      if (it != user.end()) {
        out[name] = it->second;
      } else if (defaults_.at(name)) {
        out[name] = *defaults_.at(name);
      } else {
        missing.push_back(name);
      }
    }
    return out;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::optional<double>> defaults_;
};

OdeModelSpec make_logistic(const std::map<std::string, double>& params) {
  ParamTable table;
  table.add("xi1", 0.1);
  table.add("beta1", 2.5);
  table.add("beta2", -0.125);

  OdeModelSpec spec;
  spec.name = "logistic";
  spec.p = 1;
  spec.b = 2;
  spec.target_index = 0;
  spec.regressors = {[](const Eigen::VectorXd& x) { return x[0]; },
                     [](const Eigen::VectorXd& x) { return x[0] * x[0]; }};
  const auto v = table.resolve(spec.name, params, spec.missing);
  if (spec.missing.empty()) {
    const double b1 = v.at("beta1"), b2 = v.at("beta2");
    spec.rhs = [b1, b2](const Eigen::VectorXd& x) {
      Eigen::VectorXd dx(1);
      dx[0] = b1 * x[0] + b2 * x[0] * x[0];
      return dx;
    };
    spec.x0 = Eigen::VectorXd::Constant(1, v.at("xi1"));
    spec.target_beta = Eigen::Vector2d(b1, b2);
  }
  return spec;
}

OdeModelSpec make_lotka_volterra(const std::map<std::string, double>& params) {
  ParamTable table;
  table.add("xi1", 2.0);
  table.add("beta1", 0.1);
  table.add("beta2", -0.2);
  table.add("xi2", std::nullopt);
  table.add("beta3", std::nullopt);
  table.add("beta4", std::nullopt);

  OdeModelSpec spec;
  spec.name = "lotka_volterra";
  spec.p = 2;
  spec.b = 2;
  spec.target_index = 0;
  spec.regressors = {[](const Eigen::VectorXd& x) { return x[0]; },
                     [](const Eigen::VectorXd& x) { return x[0] * x[1]; }};
  const auto v = table.resolve(spec.name, params, spec.missing);
  spec.target_beta = Eigen::Vector2d(v.at("beta1"), v.at("beta2"));
  if (spec.missing.empty()) {
    const double b1 = v.at("beta1"), b2 = v.at("beta2");
    const double b3 = v.at("beta3"), b4 = v.at("beta4");
    spec.rhs = [b1, b2, b3, b4](const Eigen::VectorXd& x) {
      Eigen::VectorXd dx(2);
      dx[0] = b1 * x[0] + b2 * x[0] * x[1];
      dx[1] = b3 * x[1] + b4 * x[0] * x[1];
      return dx;
    };
    spec.x0 = Eigen::Vector2d(v.at("xi1"), v.at("xi2"));
  }
  return spec;
}

OdeModelSpec make_hiv(const std::map<std::string, double>& params) {
  ParamTable table;
  table.add("xi1", 60.0);
  table.add("beta1", 20.0);
  table.add("beta2", -0.108);
  table.add("beta3", -0.095e-2);
  table.add("xi2", std::nullopt);
  table.add("xi3", std::nullopt);
  table.add("beta4", std::nullopt);
  table.add("beta5", std::nullopt);

  OdeModelSpec spec;
  spec.name = "hiv";
  spec.p = 3;
  spec.b = 3;
  spec.target_index = 0;
  spec.regressors = {[](const Eigen::VectorXd&) { return 1.0; },
                     [](const Eigen::VectorXd& x) { return x[0]; },
                     [](const Eigen::VectorXd& x) { return x[0] * x[2]; }};
  const auto v = table.resolve(spec.name, params, spec.missing);
  spec.target_beta =
      Eigen::Vector3d(v.at("beta1"), v.at("beta2"), v.at("beta3"));
  if (spec.missing.empty()) {
    const double b1 = v.at("beta1"), b2 = v.at("beta2"), b3 = v.at("beta3");
    const double b4 = v.at("beta4"), b5 = v.at("beta5");
    spec.rhs = [b1, b2, b3, b4, b5](const Eigen::VectorXd& x) {
      Eigen::VectorXd dx(3);
      dx[0] = b1 + b2 * x[0] + b3 * x[0] * x[2];
      dx[1] = b3 * x[0] * x[2] - 0.5 * x[1];
      dx[2] = 0.5 * b4 * x[1] + b5 * x[2];
      return dx;
    };
    spec.x0 = Eigen::Vector3d(v.at("xi1"), v.at("xi2"), v.at("xi3"));
  }
  return spec;
}

OdeModelSpec make_fitzhugh_nagumo(const std::map<std::string, double>& params) {
  ParamTable table;
  table.add("a", 0.2);
  table.add("b", 0.2);
  table.add("c", 3.0);
  table.add("xi1", 0.5);
  table.add("xi2", 0.5);

  OdeModelSpec spec;
  spec.name = "fitzhugh_nagumo";
  spec.p = 2;
  spec.b = 3;
  spec.target_index = 1;  // the recovery equation is the inferred one
  spec.regressors = {[](const Eigen::VectorXd& x) { return x[0]; },
                     [](const Eigen::VectorXd&) { return 1.0; },
                     [](const Eigen::VectorXd& x) { return x[1]; }};
  const auto v = table.resolve(spec.name, params, spec.missing);
  const double a = v.at("a"), b = v.at("b"), c = v.at("c");
  spec.rhs = [a, b, c](const Eigen::VectorXd& x) {
    Eigen::VectorXd dx(2);
    dx[0] = c * (x[0] - x[0] * x[0] * x[0] / 3.0 + x[1]);
    dx[1] = -(x[0] - a + b * x[1]) / c;
    return dx;
  };
  spec.x0 = Eigen::Vector2d(v.at("xi1"), v.at("xi2"));
  spec.target_beta = Eigen::Vector3d(-1.0 / c, a / c, -b / c);
  return spec;
}

}  // namespace

std::vector<std::string> builtin_systems() {
  return {"logistic", "lotka_volterra", "hiv", "fitzhugh_nagumo"};
}

OdeModelSpec make_system(const std::string& name,
                         const std::map<std::string, double>& params) {
  if (name == "logistic") return make_logistic(params);
  if (name == "lotka_volterra") return make_lotka_volterra(params);
  if (name == "hiv") return make_hiv(params);
  if (name == "fitzhugh_nagumo") return make_fitzhugh_nagumo(params);
  throw invalid_input("unknown system '" + name + "'");
}

int default_knots(const std::string& name) {
  if (name == "logistic") return 2;
  if (name == "lotka_volterra") return 5;
  if (name == "hiv") return 20;
  if (name == "fitzhugh_nagumo") return 10;
  throw invalid_input("no default knot count for system '" + name + "'");
}

}  // namespace snm
