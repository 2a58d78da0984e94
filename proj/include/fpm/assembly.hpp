#pragma once

#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <map>

#include "fpm/geometry.hpp"
#include "fpm/material.hpp"
#include "fpm/shape.hpp"

namespace fpm {

/// Interior-penalty and essential-BC penalty parameters. eta11/eta12/eta21/eta22
/// carry units of Young's modulus, eta13/eta23 units of permittivity.
struct PenaltyParams {
  double eta11 = 0, eta12 = 0, eta21 = 0, eta22 = 0;
  double eta13 = 0, eta23 = 0;
};

/// Normal-dependent matrices of the numerical implementation plus the constant
/// kinematic maps (c3: eps_,1 = c3*kap, c4: eps_,2 = c4*kap).
struct EdgeGeometryMatrices {
  Eigen::Matrix<double, 2, 3> n1;
  Eigen::Matrix<double, 2, 6> n21, n22;
  Eigen::Matrix<double, 4, 6> n3;
  Eigen::Matrix<double, 2, 4> n4, s4;

  explicit EdgeGeometryMatrices(const Vec2& n);

  static const Eigen::Matrix<double, 2, 4>& c1();
  static const Eigen::Matrix<double, 2, 4>& c2();
  static const Eigen::Matrix<double, 3, 6>& c3();
  static const Eigen::Matrix<double, 3, 6>& c4();
};

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

/// Boundary conditions of one external-boundary family (keyed by boundary_id).
/// Per displacement component: essential value (u) or traction (Q); per
/// normal-derivative component: essential (d) or double traction (R); and
/// either potential (phi) or surface charge (omega). Unset data means zero.
struct EdgeBC {
  std::array<bool, 2> u_essential{false, false};
  VectorFn u_data;
  VectorFn Q_data;
  std::array<bool, 2> d_essential{false, false};
  VectorFn d_data;
  VectorFn R_data;
  bool phi_essential = false;
  ScalarFn phi_data;
  ScalarFn omega_data;
};

struct BCData {
  std::map<int, EdgeBC> by_boundary;
  const EdgeBC& at(const Edge& edge) const;
};

struct GlobalSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd f;
  int npoints = 0;

  int u_dof(int pid, int comp) const { return 2 * pid + comp; }
  int phi_dof(int pid) const { return 2 * npoints + pid; }
  int ndof() const { return 3 * npoints; }

  /// max|K - K^T| / max|K|
  double symmetry_error() const;
};

/// Dense contribution over a combined DOF list. Kuu and Kpp are kept exactly
/// symmetric; the phi-u block is the transpose of Kup and is scattered as such.
struct DenseBlock {
  std::vector<int> udofs, pdofs; // global indices (duplicates allowed)
  Eigen::MatrixXd Kuu, Kup, Kpp;
  Eigen::VectorXd fu, fp;

  void init(const GlobalSystem& sys, const std::vector<int>& pts_a,
            const std::vector<int>& pts_b);
};

/// Cell quadrature: 2x2 Gauss on quadrilaterals (bilinear map), centroid-fan
/// triangulation with the degree-2 midpoint rule on general polygons.
std::vector<std::pair<Vec2, double>> quadrature_points(const Subdomain& cell);

/// One-point (midpoint) rule.
std::pair<Vec2, double> edge_quadrature(const Edge& edge);

class Assembler {
 public:
  Assembler(const PartitionedDomain& part, const std::vector<SupportSet>& supports,
            const std::vector<DQWeights>& weights, const ConstitutiveSet& set,
            const BCData& bcs, const PenaltyParams& penalties);

  DenseBlock cell_stiffness(int cell_id) const;
  DenseBlock internal_edge_stiffness(const Edge& edge) const;
  DenseBlock essential_bc_stiffness(const Edge& edge) const;
  DenseBlock natural_bc_load(const Edge& edge) const;

  /// Optional volume loads.
  VectorFn body_force;
  ScalarFn free_charge;

  GlobalSystem assemble(int threads = 1) const;

 private:
  const PartitionedDomain& part_;
  const std::vector<SupportSet>& supports_;
  const std::vector<DQWeights>& weights_;
  const ConstitutiveSet& set_;
  const BCData& bcs_;
  PenaltyParams pen_;
  GlobalSystem proto_;

  CellOperators ops_at(int cell, const Vec2& x) const;
};

GlobalSystem assemble(const PartitionedDomain& part, const std::vector<SupportSet>& supports,
                      const std::vector<DQWeights>& weights, const ConstitutiveSet& set,
                      const BCData& bcs, const PenaltyParams& penalties, int threads = 1);

} // namespace fpm
