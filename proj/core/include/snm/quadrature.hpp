#pragma once

#include <Eigen/Dense>
#include <functional>

#include "snm/errors.hpp"

namespace snm {

// Columns are the running integrals of the regressor functions from the
// first observation time; row one is therefore identically zero.
struct DesignMatrix {
  Eigen::MatrixXd H;       // n x b
  Eigen::VectorXd times;   // observation grid the integrals live on
};

// Cumulative trapezoidal integral from times[0].
Eigen::VectorXd cumtrapz(const Eigen::VectorXd& values,
                         const Eigen::VectorXd& times);

// Integrate pre-evaluated regressor columns on the observation grid.
// refine > 1 interpolates the column values linearly onto a refine-times
// denser grid before integrating and samples the result back at the
// observed points.
DesignMatrix build_design(const Eigen::MatrixXd& regressor_matrix,
                          const Eigen::VectorXd& times, int refine = 1);

// Maps a block of states (rows) to the corresponding regressor rows.
using RegressorEval =
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd& states)>;

// Same, but the regressors are re-evaluated on the denser grid: the state
// columns are interpolated linearly and eval is applied to the fine rows.
// Worth the cost when the regressors are nonlinear in the state.
DesignMatrix build_design(const Eigen::MatrixXd& states,
                          const RegressorEval& eval,
                          const Eigen::VectorXd& times, int refine = 1);

}  // namespace snm
