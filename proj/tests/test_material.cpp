#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fpm/material.hpp"

using namespace fpm;

namespace {

MaterialProperties cylinder_material() {
  MaterialProperties p;
  p.E_young = 139e9;
  p.nu = 0.3;
  p.l = 2e-6;
  p.mu11 = p.mu12 = p.mu44 = 1e-6;
  p.k11 = p.k33 = 1e-9;
  return p;
}

} // namespace

TEST_CASE("lame parameters") {
  auto [l1, g1] = lame_parameters(139e9, 0.3);
  CHECK(l1 == doctest::Approx(80.1923076923e9).epsilon(1e-10));
  CHECK(g1 == doctest::Approx(53.4615384615e9).epsilon(1e-10));

  auto [l2, g2] = lame_parameters(1e9, 0.0);
  CHECK(l2 == 0.0);
  CHECK(g2 == doctest::Approx(0.5e9));

  auto [l3, g3] = lame_parameters(100e9, 0.37);
  CHECK(l3 == doctest::Approx(100e9 * 0.37 / (1.37 * 0.26)).epsilon(1e-12));
  CHECK(g3 == doctest::Approx(100e9 / (2 * 1.37)).epsilon(1e-12));

  CHECK_THROWS_AS(lame_parameters(100e9, 0.5), Error);
}

TEST_CASE("raw matrices follow the printed structure") {
  auto p = cylinder_material();
  auto s = build_raw_matrices(p);
  const auto [lambda, G] = lame_parameters(p.E_young, p.nu);
  const double l2 = p.l * p.l;

  CHECK(s.Dse_raw(0, 0) == doctest::Approx(lambda + 2 * G));
  CHECK(s.Dse_raw(0, 1) == doctest::Approx(lambda));
  CHECK(s.Dse_raw(2, 2) == doctest::Approx(G));

  CHECK(s.Dmk_raw(0, 0) == doctest::Approx(l2 * (lambda + 2 * G)));
  CHECK(s.Dmk_raw(2, 2) == doctest::Approx(l2 * (lambda + 3 * G) / 4));
  CHECK(s.Dmk_raw(2, 5) == doctest::Approx(l2 * G / 2));
  CHECK(s.Dmk_raw(4, 4) == doctest::Approx(l2 * G));
  CHECK((s.Dmk_raw - s.Dmk_raw.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // A0 for mu11 = mu12 = mu44 = 1e-6: first row [1e-6, 0], entry (3,0) = 1e-6
  CHECK(s.A0(0, 0) == doctest::Approx(1e-6));
  CHECK(s.A0(0, 1) == 0.0);
  CHECK(s.A0(3, 0) == doctest::Approx(1e-6));
  CHECK(s.A0(2, 1) == doctest::Approx(1e-6));

  // zero material length and zero piezo coefficients wipe the blocks
  MaterialProperties q = p;
  q.l = 0;
  auto sz = build_raw_matrices(q);
  CHECK(sz.Dmk_raw.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sz.e_mat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("condensation") {
  auto p = cylinder_material();
  auto s = make_constitutive(p);

  // non-piezoelectric: Dse unchanged, G0 = 0
  CHECK((s.Dse - s.Dse_raw).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.G0.cwiseAbs().maxCoeff() == 0.0);

  // Dmk(0,0) = l^2 (lambda + 2G) - mu^2 / (k - eps0)
  const auto [lambda, G] = lame_parameters(p.E_young, p.nu);
  const double expect =
      p.l * p.l * (lambda + 2 * G) - 1e-6 * 1e-6 / (1e-9 - kVacuumPermittivity);
  CHECK(s.Dmk(0, 0) == doctest::Approx(expect).epsilon(1e-12));

  // A0 = 0 leaves Dmk raw
  MaterialProperties q = p;
  q.mu11 = q.mu12 = q.mu44 = 0;
  auto sq = make_constitutive(q);
  CHECK((sq.Dmk - sq.Dmk_raw).cwiseAbs().maxCoeff() == 0.0);

  // symmetry of the condensed matrices
  CHECK((s.Dse - s.Dse.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.Dmk - s.Dmk.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("condensation reduces stiffness") {
  auto s = make_constitutive(cylinder_material());
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Vector3d eps(dist(rng), dist(rng), dist(rng));
    CHECK(eps.dot(s.Dse_raw * eps) > 0.0);
    Eigen::Matrix<double, 6, 1> kap;
    for (int i = 0; i < 6; ++i) kap[i] = dist(rng);
    CHECK(kap.dot(s.Dmk * kap) <= kap.dot(s.Dmk_raw * kap) + 1e-12);
  }
}

TEST_CASE("Dmk_raw scales as l^2") {
  auto p = cylinder_material();
  auto s1 = build_raw_matrices(p);
  p.l *= 3.0;
  auto s3 = build_raw_matrices(p);
  CHECK((s3.Dmk_raw - 9.0 * s1.Dmk_raw).cwiseAbs().maxCoeff() <=
        1e-12 * s3.Dmk_raw.cwiseAbs().maxCoeff());
}

TEST_CASE("evaluate_fields") {
  auto s = make_constitutive(cylinder_material());

  auto z = evaluate_fields(s, Eigen::Vector3d::Zero(), Eigen::Matrix<double, 6, 1>::Zero(),
                           Eigen::Vector2d::Zero());
  CHECK(z.sigma.norm() == 0.0);
  CHECK(z.mu.norm() == 0.0);
  CHECK(z.P.norm() == 0.0);

  // non-piezo, strain only: P = 0, sigma = Dse*eps
  Eigen::Vector3d eps(1e-4, -2e-4, 3e-4);
  auto f = evaluate_fields(s, eps, Eigen::Matrix<double, 6, 1>::Zero(), Eigen::Vector2d::Zero());
  CHECK(f.P.norm() == 0.0);
  CHECK((f.sigma - s.Dse * eps).norm() == 0.0);

  // uniform E with diagonal kbar: P = (kbar - eps0 I) E componentwise
  Eigen::Vector2d E(2.0, -1.0);
  auto g = evaluate_fields(s, Eigen::Vector3d::Zero(), Eigen::Matrix<double, 6, 1>::Zero(), E);
  CHECK(g.P[0] == doctest::Approx((1e-9 - kVacuumPermittivity) * 2.0));
  CHECK(g.P[1] == doctest::Approx(-(1e-9 - kVacuumPermittivity)));
}

TEST_CASE("shear stress layout audit") {
  // pure shear through the strain vector: sigma12 = G * (2 eps12)/... must
  // reproduce the isotropic law sigma12 = 2 G eps12
  MaterialProperties p;
  p.E_young = 10e9;
  p.nu = 0.25;
  p.k11 = p.k33 = 1e-9;
  auto s = make_constitutive(p);
  const auto [lambda, G] = lame_parameters(p.E_young, p.nu);
  (void)lambda;
  const double eps12 = 1e-3;
  Eigen::Vector3d eps(0, 0, 2 * eps12);
  auto f = evaluate_fields(s, eps, Eigen::Matrix<double, 6, 1>::Zero(), Eigen::Vector2d::Zero());
  CHECK(f.sigma[2] == doctest::Approx(2 * G * eps12).epsilon(1e-12));
  CHECK(f.sigma[0] == 0.0);
}

TEST_CASE("material validation") {
  MaterialProperties p;
  p.E_young = -1;
  p.k11 = p.k33 = 1e-9;
  CHECK_THROWS_AS(p.validate(), Error);
  p.E_young = 1e9;
  p.k11 = 1e-13; // below vacuum permittivity
  CHECK_THROWS_AS(p.validate(), Error);
}
