#include "snm/samplers.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <sstream>

namespace snm {

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factorize_precision(const Eigen::MatrixXd& P) {
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() == Eigen::Success) return llt;

  const auto d = P.rows();
  double jitter = 1e-10 * P.trace() / static_cast<double>(d);
  if (!(jitter > 0.0)) jitter = 1e-10;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd jittered = P;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt;
    jitter *= 10.0;
  }
  std::ostringstream msg;
  msg << "precision factorization failed for dimension " << d
      << " (trace " << P.trace() << ", jitter escalated to " << jitter << ")";
  throw numerical_error(msg.str());
}

}  // namespace

Eigen::VectorXd mvn_precision_draw(const Eigen::MatrixXd& precision,
                                   const Eigen::VectorXd& linear_term,
                                   RngStream& rng) {
  if (precision.rows() < 1 || precision.rows() != precision.cols() ||
      precision.rows() != linear_term.size()) {
    throw invalid_input("mvn_precision_draw: dimension mismatch");
  }
  const auto llt = factorize_precision(precision);
  const Eigen::VectorXd mean = llt.solve(linear_term);

  Eigen::VectorXd z(linear_term.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  // With P = U^T U, the solve U^{-1} z has covariance (U^T U)^{-1} = P^{-1}.
  const Eigen::VectorXd noise = llt.matrixU().solve(z);
  return mean + noise;
}

Eigen::VectorXd mvn_precision_mean(const Eigen::MatrixXd& precision,
                                   const Eigen::VectorXd& linear_term) {
  if (precision.rows() < 1 || precision.rows() != precision.cols() ||
      precision.rows() != linear_term.size()) {
    throw invalid_input("mvn_precision_mean: dimension mismatch");
  }
  return factorize_precision(precision).solve(linear_term);
}

double gamma_draw(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw invalid_input("gamma_draw: shape and rate must be positive");
  }
  // Marsaglia-Tsang squeeze; shapes below one are boosted through
  // G(a) = G(a+1) * U^{1/a}.
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::max(boost * d * v / rate, 1e-12);
    }
  }
}

double inv_gamma_draw(double shape, double rate, RngStream& rng) {
  return 1.0 / gamma_draw(shape, rate, rng);
}

}  // namespace snm
