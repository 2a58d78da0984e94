#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fpm/solver.hpp"

using namespace fpm;

namespace {

GlobalSystem diag_system(const std::vector<double>& d) {
  GlobalSystem sys;
  sys.npoints = int(d.size()) / 3;
  sys.K.resize(int(d.size()), int(d.size()));
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < int(d.size()); ++i) t.emplace_back(i, i, d[size_t(i)]);
  sys.K.setFromTriplets(t.begin(), t.end());
  sys.f = Eigen::VectorXd::Zero(int(d.size()));
  return sys;
}

} // namespace

TEST_CASE("identity solve") {
  auto sys = diag_system({1, 1, 1});
  sys.f[0] = 1.0;
  auto sol = solve(sys);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == 0.0);
  CHECK(sol.residual_norm <= 1e-12);
}

TEST_CASE("empty constraints leave the system unchanged") {
  auto sys = diag_system({2, 3, 4});
  auto red = apply_constraints(sys, {});
  CHECK(red.K.rows() == 3);
  CHECK(Eigen::MatrixXd(red.K).isApprox(Eigen::MatrixXd(sys.K)));
  CHECK(red.g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tying two DOFs of a diagonal system adds their stiffness") {
  auto sys = diag_system({2, 3, 4});
  ConstraintSet cons;
  cons.groups = {{1, 2}};
  auto red = apply_constraints(sys, cons);
  REQUIRE(red.K.rows() == 2);
  Eigen::MatrixXd K(red.K);
  CHECK(K(0, 0) == doctest::Approx(2.0));
  CHECK(K(1, 1) == doctest::Approx(7.0));
  CHECK(K(0, 1) == 0.0);
}

TEST_CASE("tied DOFs recover identical values") {
  auto sys = diag_system({2, 3, 4});
  sys.f << 2.0, 3.0, 1.0;
  ConstraintSet cons;
  cons.groups = {{1, 2}};
  auto sol = solve(sys, cons);
  CHECK(sol.x[1] == sol.x[2]); // exact, via the recovery map
  CHECK(sol.x[1] == doctest::Approx(4.0 / 7.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
}

TEST_CASE("fixed DOFs are eliminated and recovered") {
  GlobalSystem sys;
  sys.npoints = 1;
  sys.K.resize(3, 3);
  std::vector<Eigen::Triplet<double>> t = {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0},
                                           {1, 1, 2.0}, {2, 2, 1.0}};
  sys.K.setFromTriplets(t.begin(), t.end());
  sys.f = Eigen::VectorXd::Zero(3);
  ConstraintSet cons;
  cons.fixed = {{0, 5.0}};
  auto sol = solve(sys, cons);
  CHECK(sol.x[0] == 5.0);
  CHECK(sol.x[1] == doctest::Approx(-2.5)); // 2 x1 = -K10 * 5
}

TEST_CASE("overlapping constraints are rejected") {
  auto sys = diag_system({1, 1, 1});
  ConstraintSet cons;
  cons.groups = {{0, 1}};
  cons.fixed = {{1, 0.0}};
  CHECK_THROWS_AS(apply_constraints(sys, cons), Error);
}

TEST_CASE("singular system reports near-null vectors") {
  // 2 points, u-diagonal stiffness but zero phi block: constant potential is null
  GlobalSystem sys;
  sys.npoints = 2;
  sys.K.resize(6, 6);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < 4; ++i) t.emplace_back(i, i, 1.0);
  sys.K.setFromTriplets(t.begin(), t.end());
  sys.f = Eigen::VectorXd::Ones(6);
  try {
    solve(sys);
    CHECK(false);
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("constant-potential") != std::string::npos);
  }
}

TEST_CASE("constraint reduction preserves symmetry") {
  GlobalSystem sys;
  sys.npoints = 2;
  sys.K.resize(6, 6);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) t.emplace_back(i, j, 1.0 / (1 + std::abs(i - j)));
  sys.K.setFromTriplets(t.begin(), t.end());
  sys.f = Eigen::VectorXd::Zero(6);
  ConstraintSet cons;
  cons.groups = {{0, 3, 4}};
  cons.fixed = {{5, 1.0}};
  auto red = apply_constraints(sys, cons);
  Eigen::MatrixXd K(red.K);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * K.cwiseAbs().maxCoeff());
}
