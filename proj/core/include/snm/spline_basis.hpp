#pragma once

#include <Eigen/Dense>

#include "snm/errors.hpp"

namespace snm {

// Ordered interior knots, strictly inside the open unit interval.
struct KnotSet {
  Eigen::VectorXd knots;

  int size() const { return static_cast<int>(knots.size()); }
  void validate() const;
};

// Per-component smoothing workspace: cubic-spline basis evaluated at the
// rescaled observation times plus the wiggliness penalty. The penalty is
// zero on the first two rows/columns (constant and linear terms are free);
// its lower-right block is the kernel Gram matrix at the knots.
struct SplineWorkspace {
  KnotSet knots;
  Eigen::MatrixXd basis;    // n x (q+2)
  Eigen::MatrixXd penalty;  // (q+2) x (q+2)
};

// Affine map of strictly increasing times onto [0,1].
Eigen::VectorXd rescale_times(const Eigen::VectorXd& times);

// q equally spaced interior knots h/(q+1), h = 1..q. Requires q+2 < n so the
// basis stays full rank against the data.
KnotSet place_knots(const Eigen::VectorXd& rescaled_times, int q);

// Cubic-regression-spline kernel R(x,z) on [0,1]x[0,1].
double basis_kernel(double x, double z);

// Columns: 1, t, R(t, kappa_1), ..., R(t, kappa_q).
Eigen::MatrixXd build_basis_matrix(const Eigen::VectorXd& rescaled_times,
                                   const KnotSet& knots);

Eigen::MatrixXd build_penalty_matrix(const KnotSet& knots);

// rescale + place_knots + basis + penalty in one call.
SplineWorkspace make_workspace(const Eigen::VectorXd& times, int q);

}  // namespace snm
