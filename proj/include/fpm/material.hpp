#pragma once

#include <Eigen/Dense>

#include "fpm/geometry.hpp"

namespace fpm {

constexpr double kVacuumPermittivity = 8.854187817e-12; // F/m

struct MaterialProperties {
  double E_young = 0;  // Pa
  double nu = 0;       // -
  double l = 0;        // m, internal material length
  double mu11 = 0;     // C/m, flexoelectric
  double mu12 = 0;     // C/m
  double mu44 = 0;     // C/m
  double k11 = 0;      // F/m, dielectric
  double k33 = 0;      // F/m
  double e15 = 0;      // C/m^2, piezoelectric
  double e31 = 0;      // C/m^2
  double e33 = 0;      // C/m^2
  double eps0 = kVacuumPermittivity; // F/m

  void validate() const;
};

/// Raw and condensed constitutive matrices.
///
/// Vector layouts: eps = [e11,e22,2e12], kap = [k111,k222,2k121,2k122,k221,k112],
/// mu = [m111,m222,m121,m122,m221,m112], E = [E1,E2].
struct ConstitutiveSet {
  Eigen::Matrix3d Dse_raw;             // stress-strain, plane strain
  Eigen::Matrix<double, 6, 6> Dmk_raw; // double stress - strain gradient, l^2 prefactor
  Eigen::Matrix2d kbar;                // dielectric
  Eigen::Matrix<double, 2, 3> e_mat;   // piezoelectric
  Eigen::Matrix<double, 6, 2> A0;      // flexoelectric
  // condensed (polarization eliminated)
  Eigen::Matrix3d Dse;
  Eigen::Matrix<double, 6, 6> Dmk;
  Eigen::Matrix<double, 3, 6> G0;
  double eps0 = kVacuumPermittivity;
};

/// Plane-strain Lame parameters (lambda, G).
std::pair<double, double> lame_parameters(double E_young, double nu);

/// Raw property matrices; the condensed blocks are left equal to the raw ones
/// until condense() runs.
ConstitutiveSet build_raw_matrices(const MaterialProperties& props);

/// Eliminate polarization: Dse, Dmk, G0 from the raw set.
void condense(ConstitutiveSet& set, double eps0);

/// Full constitutive build.
ConstitutiveSet make_constitutive(const MaterialProperties& props);

/// Stress, double stress and polarization from strain, strain gradient and
/// electric field.
struct FieldState {
  Eigen::Vector3d sigma;
  Eigen::Matrix<double, 6, 1> mu;
  Eigen::Vector2d P;
};
FieldState evaluate_fields(const ConstitutiveSet& set, const Eigen::Vector3d& eps,
                           const Eigen::Matrix<double, 6, 1>& kap, const Eigen::Vector2d& E);

} // namespace fpm
