#pragma once

#include <Eigen/Dense>

#include "fpm/geometry.hpp"

namespace fpm {

/// Multiquadric shape parameters. c = c0 * D0 where D0 is the diameter of the
/// minimal circle enclosing the supporting points.
struct RBFParams {
  double c0 = 0;
  double D0 = 0;
  double c = 0;
};

/// Row order of the 9 derivative weights:
/// ,1  ,2  ,11  ,12  ,22  ,111  ,112  ,122  ,222
struct DQWeights {
  int point_id = -1;
  Eigen::Matrix<double, 9, Eigen::Dynamic> weights; // 9 x (m+1); column 0 = center
  double cond_G = 0;
  RBFParams params;
  int m() const { return int(weights.cols()) - 1; }
};

/// Shifted multiquadric basis g_i centered between support point i and the
/// expansion point: sqrt(|x-x_i|^2 + c^2) - sqrt(|x-x_0|^2 + c^2).
double mq_shifted_basis(const Vec2& xi, const Vec2& x0, const Vec2& x, double c);

/// Analytic partial derivative d^{s+t} g_i / dx^s dy^t, 1 <= s+t <= 3.
double mq_derivative(const Vec2& xi, const Vec2& x0, const Vec2& x, double c, int s, int t);

/// Diameter of the minimal enclosing circle of a point set (Welzl).
double min_enclosing_circle_diameter(const std::vector<Vec2>& pts);

/// Build the 9x(m+1) differential-quadrature weight matrix for one support set.
/// Throws on numerically singular interpolation systems (cond > cond_limit).
DQWeights build_weights(const SupportSet& support, const std::vector<Vec2>& coords, double c0,
                        double cond_limit = 1e14);

/// Weight matrices for every point, optionally computed on `threads` workers.
/// Results are indexed by point id and independent of the thread count.
std::vector<DQWeights> build_all_weights(const PartitionedDomain& part,
                                         const std::vector<SupportSet>& supports, double c0,
                                         int threads = 1, double cond_limit = 1e14);

} // namespace fpm
