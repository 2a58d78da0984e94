#include "fpm/material.hpp"

namespace fpm {

void MaterialProperties::validate() const {
  if (!(E_young > 0)) throw Error("Young's modulus must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw Error("Poisson ratio out of range (-1, 0.5)");
  if (l < 0) throw Error("material length must be nonnegative");
  if (!(k11 > eps0) || !(k33 > eps0))
    throw Error("dielectric constants must exceed the vacuum permittivity");
}

std::pair<double, double> lame_parameters(double E_young, double nu) {
  if (!(E_young > 0)) throw Error("Young's modulus must be positive");
  if (nu >= 0.5) throw Error("incompressible material (nu = 0.5) is not supported");
  if (nu <= -1.0) throw Error("Poisson ratio out of range");
  const double lambda = E_young * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double G = E_young / (2.0 * (1.0 + nu));
  return {lambda, G};
}

ConstitutiveSet build_raw_matrices(const MaterialProperties& props) {
  props.validate();
  const auto [lambda, G] = lame_parameters(props.E_young, props.nu);
  ConstitutiveSet s;
  s.eps0 = props.eps0;

  s.Dse_raw << lambda + 2 * G, lambda, 0, lambda, lambda + 2 * G, 0, 0, 0, G;

  const double l2 = props.l * props.l;
  s.Dmk_raw.setZero();
  s.Dmk_raw(0, 0) = lambda + 2 * G;
  s.Dmk_raw(0, 3) = lambda / 2;
  s.Dmk_raw(1, 1) = lambda + 2 * G;
  s.Dmk_raw(1, 2) = lambda / 2;
  s.Dmk_raw(2, 1) = lambda / 2;
  s.Dmk_raw(2, 2) = (lambda + 3 * G) / 4;
  s.Dmk_raw(2, 5) = G / 2;
  s.Dmk_raw(3, 0) = lambda / 2;
  s.Dmk_raw(3, 3) = (lambda + 3 * G) / 4;
  s.Dmk_raw(3, 4) = G / 2;
  s.Dmk_raw(4, 3) = G / 2;
  s.Dmk_raw(4, 4) = G;
  s.Dmk_raw(5, 2) = G / 2;
  s.Dmk_raw(5, 5) = G;
  s.Dmk_raw *= l2;

  s.kbar << props.k11, 0, 0, props.k33;

  s.e_mat << 0, 0, props.e15, props.e31, props.e33, 0;

  const double mix = 0.5 * (props.mu12 + props.mu44);
  s.A0.setZero();
  s.A0(0, 0) = props.mu11;
  s.A0(1, 1) = props.mu11;
  s.A0(2, 1) = mix;
  s.A0(3, 0) = mix;
  s.A0(4, 0) = props.mu44;
  s.A0(5, 1) = props.mu44;

  s.Dse = s.Dse_raw;
  s.Dmk = s.Dmk_raw;
  s.G0.setZero();
  return s;
}

void condense(ConstitutiveSet& s, double eps0) {
  s.eps0 = eps0;
  Eigen::Matrix2d kr = s.kbar - eps0 * Eigen::Matrix2d::Identity();
  const double det = kr(0, 0) * kr(1, 1) - kr(0, 1) * kr(1, 0);
  if (std::abs(det) < 1e-300) throw Error("singular kbar - eps0*I, cannot condense");
  Eigen::Matrix2d kri;
  kri << kr(1, 1) / det, -kr(0, 1) / det, -kr(1, 0) / det, kr(0, 0) / det;

  Eigen::Matrix3d dse = s.Dse_raw - s.e_mat.transpose() * kri * s.e_mat;
  Eigen::Matrix<double, 6, 6> dmk = s.Dmk_raw - s.A0 * kri * s.A0.transpose();
  // symmetrize exactly: the correction terms are symmetric up to rounding
  s.Dse = 0.5 * (dse + dse.transpose());
  s.Dmk = 0.5 * (dmk + dmk.transpose());
  s.G0 = s.e_mat.transpose() * kri * s.A0.transpose();
}

ConstitutiveSet make_constitutive(const MaterialProperties& props) {
  ConstitutiveSet s = build_raw_matrices(props);
  condense(s, props.eps0);
  return s;
}

FieldState evaluate_fields(const ConstitutiveSet& set, const Eigen::Vector3d& eps,
                           const Eigen::Matrix<double, 6, 1>& kap, const Eigen::Vector2d& E) {
  FieldState f;
  f.sigma = set.Dse * eps - set.G0 * kap - set.e_mat.transpose() * E;
  f.mu = set.Dmk * kap - set.G0.transpose() * eps - set.A0 * E;
  f.P = (set.kbar - set.eps0 * Eigen::Matrix2d::Identity()) * E + set.e_mat * eps +
        set.A0.transpose() * kap;
  return f;
}

} // namespace fpm
