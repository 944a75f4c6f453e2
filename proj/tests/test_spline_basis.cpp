#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "snm/spline_basis.hpp"

using namespace snm;

TEST_CASE("rescale_times maps endpoints to 0 and 1") {
  Eigen::Vector3d t(0.0, 0.5, 1.0);
  const Eigen::VectorXd r = rescale_times(t);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(0.5));
  CHECK(r[2] == 1.0);
}

TEST_CASE("rescale_times is the affine map (t - t1)/(tn - t1)") {
  Eigen::Vector3d t(10.0, 15.0, 30.0);
  const Eigen::VectorXd r = rescale_times(t);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(0.25));
  CHECK(r[2] == 1.0);
}

TEST_CASE("rescale_times preserves even spacing") {
  Eigen::VectorXd t(25);
  for (int i = 0; i < 25; ++i) t[i] = i * 1.0;  // 0..24
  const Eigen::VectorXd r = rescale_times(t);
  for (int i = 0; i < 25; ++i) {
    CHECK(r[i] == doctest::Approx(i / 24.0).epsilon(1e-14));
  }
}

TEST_CASE("rescale_times rejects bad grids") {
  Eigen::Vector2d two(0.0, 1.0);
  CHECK_THROWS_AS(rescale_times(two), invalid_input);
  Eigen::Vector3d dec(0.0, 2.0, 1.5);
  CHECK_THROWS_AS(rescale_times(dec), invalid_input);
  Eigen::Vector3d flat(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(rescale_times(flat), invalid_input);
}

TEST_CASE("place_knots spaces knots equally inside (0,1)") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(25, 0.0, 1.0);
  SUBCASE("q=2") {
    const KnotSet ks = place_knots(t, 2);
    REQUIRE(ks.size() == 2);
    CHECK(ks.knots[0] == doctest::Approx(1.0 / 3.0));
    CHECK(ks.knots[1] == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("q=5") {
    const KnotSet ks = place_knots(t, 5);
    REQUIRE(ks.size() == 5);
    for (int h = 0; h < 5; ++h) {
      CHECK(ks.knots[h] == doctest::Approx((h + 1) / 6.0));
    }
  }
  SUBCASE("q=1 sits at the midpoint") {
    const KnotSet ks = place_knots(t, 1);
    REQUIRE(ks.size() == 1);
    CHECK(ks.knots[0] == doctest::Approx(0.5));
  }
  SUBCASE("q+2 >= n is rejected") {
    Eigen::VectorXd small = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
    CHECK_THROWS_AS(place_knots(small, 3), invalid_input);
    CHECK_THROWS_AS(place_knots(small, 0), invalid_input);
  }
}

TEST_CASE("basis_kernel matches high-precision closed-form values") {
  // Frozen from exact rational arithmetic on the kernel formula.
  CHECK(basis_kernel(0.5, 0.5) == doctest::Approx(1.0 / 320.0).epsilon(1e-14));
  CHECK(basis_kernel(0.0, 1.0) == doctest::Approx(1.0 / 120.0).epsilon(1e-14));
  CHECK(basis_kernel(1.0 / 3.0, 2.0 / 3.0) ==
        doctest::Approx(1.0 / 9720.0).epsilon(1e-12));
  CHECK(basis_kernel(1.0 / 3.0, 1.0 / 3.0) ==
        doctest::Approx(7.0 / 3240.0).epsilon(1e-13));
  CHECK(basis_kernel(0.25, 0.75) ==
        doctest::Approx(-17.0 / 15360.0).epsilon(1e-13));
  CHECK(basis_kernel(0.0, 0.0) == doctest::Approx(1.0 / 120.0).epsilon(1e-14));
  CHECK(basis_kernel(0.1, 0.9) ==
        doctest::Approx(43.0 / 24000.0).epsilon(1e-13));
}

TEST_CASE("basis_kernel is symmetric on a grid") {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j < i; ++j) {
      const double x = i / 100.0, z = j / 100.0;
      CHECK(basis_kernel(x, z) == basis_kernel(z, x));
    }
  }
}

TEST_CASE("basis_kernel rejects out-of-domain arguments") {
  CHECK_THROWS_AS(basis_kernel(-0.01, 0.5), invalid_input);
  CHECK_THROWS_AS(basis_kernel(0.5, 1.01), invalid_input);
  CHECK_THROWS_AS(basis_kernel(std::nan(""), 0.5), invalid_input);
}

TEST_CASE("basis matrix columns: constant, identity, kernel") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(17, 0.0, 1.0);
  const KnotSet ks = place_knots(t, 3);
  const Eigen::MatrixXd basis = build_basis_matrix(t, ks);
  REQUIRE(basis.rows() == 17);
  REQUIRE(basis.cols() == 5);
  CHECK((basis.col(0).array() == 1.0).all());
  CHECK((basis.col(1) - t).norm() == 0.0);
  for (int i = 0; i < 17; ++i) {
    CHECK(basis(i, 2) == basis_kernel(t[i], ks.knots[0]));
  }
}

TEST_CASE("affine functions are reproduced exactly") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(31, 0.0, 1.0);
  const KnotSet ks = place_knots(t, 6);
  const Eigen::MatrixXd basis = build_basis_matrix(t, ks);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(8);
  SUBCASE("constant") {
    theta[0] = 3.25;
    const Eigen::VectorXd fit = basis * theta;
    CHECK((fit.array() - 3.25).abs().maxCoeff() == 0.0);
  }
  SUBCASE("linear") {
    theta[0] = -1.5;
    theta[1] = 2.75;
    const Eigen::VectorXd fit = basis * theta;
    for (int i = 0; i < 31; ++i) {
      CHECK(fit[i] == doctest::Approx(-1.5 + 2.75 * t[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("penalty matrix structure") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(25, 0.0, 1.0);

  SUBCASE("q=1 has a single nonzero entry R(k1,k1)") {
    const KnotSet ks = place_knots(t, 1);
    const Eigen::MatrixXd S = build_penalty_matrix(ks);
    REQUIRE(S.rows() == 3);
    CHECK(S(2, 2) == doctest::Approx(1.0 / 320.0).epsilon(1e-14));
    CHECK(S.topRows(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(S.leftCols(2).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("symmetric with zero first two rows/columns") {
    for (const int q : {2, 5, 20}) {
      const KnotSet ks = place_knots(t, q);
      const Eigen::MatrixXd S = build_penalty_matrix(ks);
      CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(S.topRows(2).cwiseAbs().maxCoeff() == 0.0);
      CHECK(S.leftCols(2).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("affine coefficients are unpenalized") {
    const KnotSet ks = place_knots(t, 5);
    const Eigen::MatrixXd S = build_penalty_matrix(ks);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(7);
    theta[0] = 4.0;
    theta[1] = -9.0;
    CHECK(theta.dot(S * theta) == 0.0);
  }
}

TEST_CASE("penalized block is the kernel Gram matrix and is PSD") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(30, 0.0, 1.0);
  for (const int q : {1, 2, 5, 10, 20}) {
    const KnotSet ks = place_knots(t, q);
    const Eigen::MatrixXd S = build_penalty_matrix(ks);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        CHECK(S(i + 2, j + 2) == basis_kernel(ks.knots[i], ks.knots[j]));
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        S.bottomRightCorner(q, q));
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("make_workspace wires rescaling, knots, basis and penalty") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(25, 0.0, 24.0);
  const SplineWorkspace ws = make_workspace(t, 5);
  CHECK(ws.basis.rows() == 25);
  CHECK(ws.basis.cols() == 7);
  CHECK(ws.penalty.rows() == 7);
  CHECK(ws.basis(0, 1) == 0.0);
  CHECK(ws.basis(24, 1) == 1.0);
}
