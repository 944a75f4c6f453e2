#include "snm/quadrature.hpp"

#include <sstream>

namespace snm {

namespace {

void check_grid(Eigen::Index n_values, const Eigen::VectorXd& times) {
  if (times.size() != n_values) {
    std::ostringstream msg;
    msg << "cumtrapz: " << n_values << " values against " << times.size()
        << " time points";
    throw invalid_input(msg.str());
  }
  if (times.size() < 2) throw invalid_input("cumtrapz: need at least 2 points");
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg << "cumtrapz: times not strictly increasing at index " << i;
      throw invalid_input(msg.str());
    }
  }
}

// Linear interpolation of each column onto a grid with `refine` sub-steps
// per observation interval.
void refine_grid(const Eigen::MatrixXd& columns, const Eigen::VectorXd& times,
                 int refine, Eigen::MatrixXd& fine_columns,
                 Eigen::VectorXd& fine_times) {
  const auto n = times.size();
  const Eigen::Index m = (n - 1) * refine + 1;
  fine_columns.resize(m, columns.cols());
  fine_times.resize(m);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double dt = times[i + 1] - times[i];
    for (int s = 0; s < refine; ++s) {
      const double w = static_cast<double>(s) / refine;
      const Eigen::Index row = i * refine + s;
      fine_times[row] = times[i] + w * dt;
      fine_columns.row(row) =
          (1.0 - w) * columns.row(i) + w * columns.row(i + 1);
    }
  }
  fine_times[m - 1] = times[n - 1];
  fine_columns.row(m - 1) = columns.row(n - 1);
}

DesignMatrix integrate_columns(const Eigen::MatrixXd& columns,
                               const Eigen::VectorXd& grid,
                               const Eigen::VectorXd& times, int refine) {
  DesignMatrix design;
  design.times = times;
  design.H.resize(times.size(), columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    const Eigen::VectorXd cum = cumtrapz(columns.col(j), grid);
    for (Eigen::Index i = 0; i < times.size(); ++i) {
      design.H(i, j) = cum[i * refine];
    }
  }
  return design;
}

}  // namespace

Eigen::VectorXd cumtrapz(const Eigen::VectorXd& values,
                         const Eigen::VectorXd& times) {
  check_grid(values.size(), times);
  Eigen::VectorXd out(values.size());
  out[0] = 0.0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    out[i] = out[i - 1] +
             (times[i] - times[i - 1]) * (values[i] + values[i - 1]) / 2.0;
  }
  return out;
}

DesignMatrix build_design(const Eigen::MatrixXd& regressor_matrix,
                          const Eigen::VectorXd& times, int refine) {
  if (refine < 1) throw invalid_input("build_design: refine must be >= 1");
  check_grid(regressor_matrix.rows(), times);
  if (refine == 1) return integrate_columns(regressor_matrix, times, times, 1);

  Eigen::MatrixXd fine;
  Eigen::VectorXd fine_times;
  refine_grid(regressor_matrix, times, refine, fine, fine_times);
  return integrate_columns(fine, fine_times, times, refine);
}

DesignMatrix build_design(const Eigen::MatrixXd& states,
                          const RegressorEval& eval,
                          const Eigen::VectorXd& times, int refine) {
  if (refine < 1) throw invalid_input("build_design: refine must be >= 1");
  check_grid(states.rows(), times);
  if (refine == 1) return integrate_columns(eval(states), times, times, 1);

  Eigen::MatrixXd fine_states;
  Eigen::VectorXd fine_times;
  refine_grid(states, times, refine, fine_states, fine_times);
  return integrate_columns(eval(fine_states), fine_times, times, refine);
}

}  // namespace snm
