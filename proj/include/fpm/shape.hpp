#pragma once

#include <Eigen/Dense>

#include "fpm/geometry.hpp"
#include "fpm/rbfdq.hpp"

namespace fpm {

/// Monomial row N̄(x,y) of the cubic expansion around (x0,y0):
/// [dx, dy, dx^2/2, dx dy, dy^2/2, dx^3/6, dx^2 dy/2, dx dy^2/2, dy^3/6]
Eigen::Matrix<double, 1, 9> monomial_row(const Vec2& x, const Vec2& x0);

/// Partial derivative of the monomial row, 0 <= s+t <= 3.
Eigen::Matrix<double, 1, 9> monomial_row_derivative(const Vec2& x, const Vec2& x0, int s, int t);

/// Linear operators mapping the stacked support DOFs of one subdomain to field
/// values and derivatives at a query point. Column layout: local point order is
/// [P0, P1..Pm]; displacement slots interleave (u1,u2) per point.
///
/// Vector layouts follow the constitutive convention:
///   eps  = [e11, e22, 2 e12]
///   ehat = [u1,1, u2,2, u1,2, u2,1]
///   kap  = [k111, k222, 2 k121, 2 k122, k221, k112],  k_jkl = u_l,jk
///   E    = -grad(phi)
struct CellOperators {
  int cell_id = -1;
  std::vector<int> point_ids; // local -> global point id, [center, supports...]
  Eigen::MatrixXd N;          // 2 x 2(m+1)
  Eigen::MatrixXd Nphi;       // 1 x (m+1)
  Eigen::MatrixXd Beps;       // 3 x 2(m+1)
  Eigen::MatrixXd Behat;      // 4 x 2(m+1)
  Eigen::MatrixXd Bkap;       // 6 x 2(m+1)
  Eigen::MatrixXd Bk1, Bk2;   // 6 x 2(m+1), constant over the cell
  Eigen::MatrixXd BE;         // 2 x (m+1)
  Eigen::MatrixXd BE1, BE2;   // 2 x (m+1)

  int n_local() const { return int(point_ids.size()); }
};

/// Shape-function matrix N(x,y) with N*u_E = u^h(x,y).
Eigen::MatrixXd shape_matrix(const SupportSet& support, const DQWeights& weights, const Vec2& x,
                             const Vec2& x0);

/// All field/derivative operators of one cell at a query point.
CellOperators derivative_operators(const Subdomain& cell, const SupportSet& support,
                                   const DQWeights& weights, const Vec2& x0, const Vec2& x);

} // namespace fpm
