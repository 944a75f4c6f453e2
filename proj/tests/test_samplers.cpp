#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "snm/samplers.hpp"

using namespace snm;

namespace {

constexpr int kDraws = 100000;

struct Moments {
  double mean;
  double var;
};

template <typename Draw>
Moments sample_moments(Draw&& draw, int n = kDraws) {
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  return {mean, sq / n - mean * mean};
}

}  // namespace

TEST_CASE("streams are reproducible and substreams are distinct") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  RngStream base(42);
  RngStream s1 = base.substream(1);
  RngStream s2 = base.substream(2);
  CHECK(s1.seed() != s2.seed());
  CHECK(s1.seed() == (42ull ^ splitmix64(1)));
  bool all_equal = true;
  for (int i = 0; i < 16; ++i) {
    if (s1.uniform() != s2.uniform()) all_equal = false;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform stays strictly inside (0,1)") {
  RngStream rng(7);
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("mvn with identity precision is standard normal") {
  RngStream rng(1001);
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd l = Eigen::VectorXd::Zero(3);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();
  for (int i = 0; i < kDraws; ++i) {
    const Eigen::VectorXd x = mvn_precision_draw(P, l, rng);
    sum += x;
    outer += x * x.transpose();
  }
  const Eigen::Vector3d mean = sum / kDraws;
  const double tol = 4.0 / std::sqrt(static_cast<double>(kDraws));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k]) < tol);
  const Eigen::Matrix3d cov =
      outer / kDraws - mean * mean.transpose();
  CHECK((cov - Eigen::Matrix3d::Identity()).norm() /
            Eigen::Matrix3d::Identity().norm() <
        0.03);
}

TEST_CASE("mvn scalar case: precision 4, linear term 8 -> N(2, 0.25)") {
  RngStream rng(1002);
  Eigen::MatrixXd P(1, 1);
  P << 4.0;
  Eigen::VectorXd l(1);
  l << 8.0;
  const auto m = sample_moments(
      [&] { return mvn_precision_draw(P, l, rng)[0]; });
  CHECK(m.mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(m.var == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("mvn correlated 2x2 covariance matches the analytic inverse") {
  RngStream rng(1003);
  Eigen::MatrixXd P(2, 2);
  P << 2.0, 0.6, 0.6, 1.0;
  Eigen::VectorXd l(2);
  l << 1.0, -0.5;
  const Eigen::MatrixXd cov_expected = P.inverse();
  const Eigen::VectorXd mean_expected = cov_expected * l;

  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  for (int i = 0; i < kDraws; ++i) {
    const Eigen::VectorXd x = mvn_precision_draw(P, l, rng);
    sum += x;
    outer += x * x.transpose();
  }
  const Eigen::Vector2d mean = sum / kDraws;
  const Eigen::Matrix2d cov = outer / kDraws - mean * mean.transpose();
  CHECK((mean - mean_expected).norm() / mean_expected.norm() < 0.03);
  CHECK((cov - cov_expected).norm() / cov_expected.norm() < 0.03);
}

TEST_CASE("mvn mean path agrees with an independent dense solve") {
  RngStream rng(1004);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform() * 6);
    Eigen::MatrixXd A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
    const Eigen::MatrixXd P =
        A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd l(d);
    for (int i = 0; i < d; ++i) l[i] = rng.normal();
    const Eigen::VectorXd mean = mvn_precision_mean(P, l);
    const Eigen::VectorXd oracle = P.fullPivLu().solve(l);
    CHECK((mean - oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("singular-but-PSD precision succeeds through jitter") {
  RngStream rng(1005);
  Eigen::MatrixXd P(2, 2);
  P << 1.0, 1.0, 1.0, 1.0;
  const Eigen::VectorXd l = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd x = mvn_precision_draw(P, l, rng);
  CHECK(x.allFinite());
}

TEST_CASE("indefinite precision fails with a numerical error") {
  RngStream rng(1006);
  Eigen::MatrixXd P(2, 2);
  P << 1.0, 2.0, 2.0, 1.0;
  const Eigen::VectorXd l = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(mvn_precision_draw(P, l, rng), numerical_error);
}

TEST_CASE("mvn rejects dimension mismatches") {
  RngStream rng(1007);
  CHECK_THROWS_AS(mvn_precision_draw(Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::VectorXd::Zero(3), rng),
                  invalid_input);
}

TEST_CASE("gamma(1,1) has mean 1") {
  RngStream rng(2001);
  const auto m = sample_moments([&] { return gamma_draw(1.0, 1.0, rng); });
  CHECK(m.mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma(2,4) has mean 0.5 and variance 0.125") {
  RngStream rng(2002);
  const auto m = sample_moments([&] { return gamma_draw(2.0, 4.0, rng); });
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.03));
  CHECK(m.var == doctest::Approx(0.125).epsilon(0.03));
}

TEST_CASE("gamma shape below one uses the boosted branch correctly") {
  RngStream rng(2003);
  const auto m = sample_moments([&] { return gamma_draw(0.5, 1.0, rng); });
  CHECK(m.mean == doctest::Approx(0.5).epsilon(0.03));
  CHECK(m.var == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("gamma draws are strictly positive and floored") {
  RngStream rng(2004);
  for (int i = 0; i < 20000; ++i) {
    CHECK(gamma_draw(0.3, 2.0, rng) >= 1e-12);
  }
}

TEST_CASE("gamma rejects non-positive arguments") {
  RngStream rng(2005);
  CHECK_THROWS_AS(gamma_draw(0.0, 1.0, rng), invalid_input);
  CHECK_THROWS_AS(gamma_draw(1.0, -2.0, rng), invalid_input);
}

TEST_CASE("inverse gamma(3,2) has mean 1") {
  RngStream rng(2006);
  const auto m = sample_moments([&] { return inv_gamma_draw(3.0, 2.0, rng); });
  CHECK(m.mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("inverse gamma is the exact reciprocal stream") {
  RngStream a(2007), b(2007);
  for (int i = 0; i < 1000; ++i) {
    const double inv = inv_gamma_draw(2.5, 1.5, a);
    const double g = gamma_draw(2.5, 1.5, b);
    CHECK(inv == 1.0 / g);
    CHECK(inv > 0.0);
  }
}
