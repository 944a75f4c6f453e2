#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "snm/errors.hpp"

namespace snm {

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic draw stream. Identical seeds produce identical sequences on
// any platform: the engine is mt19937_64 (fully specified by the standard)
// and every transform below is implemented here rather than delegated to the
// standard library's unspecified distribution algorithms.
//
// Parallel work never shares a stream. Worker r derives its own stream as
// seed ^ splitmix64(r), so results do not depend on the thread schedule.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_ ^ splitmix64(index));
  }

  std::uint64_t seed() const { return seed_; }

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, one value per call.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Draw from N(P^{-1} l, P^{-1}) given the precision matrix P and linear term
// l, factorizing the precision instead of inverting it. If the Cholesky
// factorization fails, jitter 1e-10*trace/d is added to the diagonal, up to
// three attempts escalating by 10x each.
Eigen::VectorXd mvn_precision_draw(const Eigen::MatrixXd& precision,
                                   const Eigen::VectorXd& linear_term,
                                   RngStream& rng);

// The mean P^{-1} l of the same distribution, via the same factorization
// path. Exposed so conditional means can be checked against closed forms.
Eigen::VectorXd mvn_precision_mean(const Eigen::MatrixXd& precision,
                                   const Eigen::VectorXd& linear_term);

// Gamma(shape, rate), mean shape/rate. Draws are floored at 1e-12 to keep
// downstream precision matrices finite.
double gamma_draw(double shape, double rate, RngStream& rng);

// Reciprocal of gamma_draw(shape, rate); mean rate/(shape-1) for shape > 1.
double inv_gamma_draw(double shape, double rate, RngStream& rng);

}  // namespace snm
