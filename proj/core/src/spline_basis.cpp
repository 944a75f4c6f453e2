#include "snm/spline_basis.hpp"

#include <cmath>
#include <sstream>

namespace snm {

void KnotSet::validate() const {
  if (knots.size() < 1) throw invalid_input("knot set must hold at least one knot");
  double prev = 0.0;
  for (Eigen::Index i = 0; i < knots.size(); ++i) {
    const double k = knots[i];
    if (!(k > 0.0 && k < 1.0)) {
      throw invalid_input("knots must lie strictly inside (0,1)");
    }
    if (i > 0 && !(k > prev)) {
      throw invalid_input("knots must be strictly increasing");
    }
    prev = k;
  }
}

Eigen::VectorXd rescale_times(const Eigen::VectorXd& times) {
  const auto n = times.size();
  if (n < 3) throw invalid_input("rescale_times: need at least 3 time points");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg << "rescale_times: times not strictly increasing at index " << i;
      throw invalid_input(msg.str());
    }
  }
  const double span = times[n - 1] - times[0];
  if (!(span > 0.0)) throw invalid_input("rescale_times: zero time span");
  Eigen::VectorXd out = (times.array() - times[0]) / span;
  out[0] = 0.0;
  out[n - 1] = 1.0;
  return out;
}

KnotSet place_knots(const Eigen::VectorXd& rescaled_times, int q) {
  if (q < 1) throw invalid_input("place_knots: q must be at least 1");
  const auto n = rescaled_times.size();
  if (q + 2 >= n) {
    std::ostringstream msg;
    msg << "place_knots: q+2 = " << q + 2 << " must be below n = " << n
        << " or the basis is rank deficient";
    throw invalid_input(msg.str());
  }
  KnotSet ks;
  ks.knots.resize(q);
  for (int h = 1; h <= q; ++h) {
    ks.knots[h - 1] = static_cast<double>(h) / (q + 1);
  }
  return ks;
}

double basis_kernel(double x, double z) {
  if (!(x >= 0.0 && x <= 1.0) || !(z >= 0.0 && z <= 1.0)) {
    throw invalid_input("basis_kernel: arguments must lie in [0,1]");
  }
  const double xm = x - 0.5;
  const double zm = z - 0.5;
  const double first = (zm * zm - 1.0 / 12.0) * (xm * xm - 1.0 / 12.0) / 4.0;
  const double d = std::abs(x - z) - 0.5;
  const double d2 = d * d;
  const double second = (d2 * d2 - 0.5 * d2 + 7.0 / 240.0) / 24.0;
  return first - second;
}

Eigen::MatrixXd build_basis_matrix(const Eigen::VectorXd& rescaled_times,
                                   const KnotSet& knots) {
  knots.validate();
  const auto n = rescaled_times.size();
  const int q = knots.size();
  Eigen::MatrixXd basis(n, q + 2);
  basis.col(0).setOnes();
  basis.col(1) = rescaled_times;
  for (int h = 0; h < q; ++h) {
    for (Eigen::Index i = 0; i < n; ++i) {
      basis(i, h + 2) = basis_kernel(rescaled_times[i], knots.knots[h]);
    }
  }
  return basis;
}

Eigen::MatrixXd build_penalty_matrix(const KnotSet& knots) {
  knots.validate();
  const int q = knots.size();
  Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(q + 2, q + 2);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = basis_kernel(knots.knots[i], knots.knots[j]);
      penalty(i + 2, j + 2) = v;
      penalty(j + 2, i + 2) = v;
    }
  }
  return penalty;
}

SplineWorkspace make_workspace(const Eigen::VectorXd& times, int q) {
  const Eigen::VectorXd rescaled = rescale_times(times);
  SplineWorkspace ws;
  ws.knots = place_knots(rescaled, q);
  ws.basis = build_basis_matrix(rescaled, ws.knots);
  ws.penalty = build_penalty_matrix(ws.knots);
  return ws;
}

}  // namespace snm
