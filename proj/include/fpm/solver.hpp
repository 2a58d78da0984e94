#pragma once

#include <Eigen/Sparse>

#include "fpm/assembly.hpp"

namespace fpm {

/// Linear equality constraints: tied DOF groups (equal values, first entry is
/// the master) and individually fixed DOFs.
struct ConstraintSet {
  std::vector<std::vector<int>> groups;
  std::vector<std::pair<int, double>> fixed;

  bool empty() const { return groups.empty() && fixed.empty(); }
};

/// Condensed system with the recovery map x = T x_r + g.
struct ReducedSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd f;
  Eigen::SparseMatrix<double> T;
  Eigen::VectorXd g;
};

struct Solution {
  Eigen::VectorXd x;      // full DOF vector
  Eigen::VectorXd ubar;   // 2*npoints displacements
  Eigen::VectorXd phibar; // npoints potentials
  double residual_norm = 0;
};

/// Congruence condensation T^T K T, T^T (f - K g); preserves symmetry.
ReducedSystem apply_constraints(const GlobalSystem& sys, const ConstraintSet& constraints);

/// Direct sparse solve of the (symmetric, indefinite) system with diagonal
/// equilibration, pivoted LU factorization and iterative refinement.
Solution solve(const GlobalSystem& sys, const ConstraintSet& constraints = {},
               double tol = 1e-10);

} // namespace fpm
