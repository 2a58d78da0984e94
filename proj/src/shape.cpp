#include "fpm/shape.hpp"

namespace fpm {

using Row9 = Eigen::Matrix<double, 1, 9>;

Row9 monomial_row(const Vec2& x, const Vec2& x0) {
  const double dx = x.x() - x0.x();
  const double dy = x.y() - x0.y();
  Row9 r;
  r << dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy, dx * dx * dx / 6.0, 0.5 * dx * dx * dy,
      0.5 * dx * dy * dy, dy * dy * dy / 6.0;
  return r;
}

Row9 monomial_row_derivative(const Vec2& x, const Vec2& x0, int s, int t) {
  const double dx = x.x() - x0.x();
  const double dy = x.y() - x0.y();
  Row9 r = Row9::Zero();
  switch (s * 10 + t) {
    case 0: return monomial_row(x, x0);
    case 10: r << 1, 0, dx, dy, 0, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy, 0; break;
    case 1: r << 0, 1, 0, dx, dy, 0, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy; break;
    case 20: r << 0, 0, 1, 0, 0, dx, dy, 0, 0; break;
    case 11: r << 0, 0, 0, 1, 0, 0, dx, dy, 0; break;
    case 2: r << 0, 0, 0, 0, 1, 0, 0, dx, dy; break;
    case 30: r(5) = 1; break;
    case 21: r(6) = 1; break;
    case 12: r(7) = 1; break;
    case 3: r(8) = 1; break;
    default: throw Error("monomial derivative order out of range");
  }
  return r;
}

namespace {

// row vector mapping nodal scalar values [P0..Pm] to d^{s+t} u / dx^s dy^t at x
Eigen::RowVectorXd scalar_row(const DQWeights& w, const Vec2& x, const Vec2& x0, int s, int t) {
  Eigen::RowVectorXd r = monomial_row_derivative(x, x0, s, t) * w.weights;
  if (s == 0 && t == 0) r(0) += 1.0; // the expansion passes through the center value
  return r;
}

// scatter a scalar row into displacement component `comp` of an interleaved row
void put(Eigen::MatrixXd& M, int row, int comp, const Eigen::RowVectorXd& s, double fac = 1.0) {
  for (int i = 0; i < s.size(); ++i) M(row, 2 * i + comp) += fac * s(i);
}

} // namespace

Eigen::MatrixXd shape_matrix(const SupportSet& support, const DQWeights& weights, const Vec2& x,
                             const Vec2& x0) {
  (void)support;
  const int n = weights.m() + 1;
  Eigen::RowVectorXd s = scalar_row(weights, x, x0, 0, 0);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(2, 2 * n);
  put(N, 0, 0, s);
  put(N, 1, 1, s);
  return N;
}

CellOperators derivative_operators(const Subdomain& cell, const SupportSet& support,
                                   const DQWeights& weights, const Vec2& x0, const Vec2& x) {
  const int n = weights.m() + 1;
  CellOperators ops;
  ops.cell_id = cell.cell_id;
  ops.point_ids.reserve(size_t(n));
  ops.point_ids.push_back(support.center);
  ops.point_ids.insert(ops.point_ids.end(), support.members.begin(), support.members.end());

  const Eigen::RowVectorXd s00 = scalar_row(weights, x, x0, 0, 0);
  const Eigen::RowVectorXd s10 = scalar_row(weights, x, x0, 1, 0);
  const Eigen::RowVectorXd s01 = scalar_row(weights, x, x0, 0, 1);
  const Eigen::RowVectorXd s20 = scalar_row(weights, x, x0, 2, 0);
  const Eigen::RowVectorXd s11 = scalar_row(weights, x, x0, 1, 1);
  const Eigen::RowVectorXd s02 = scalar_row(weights, x, x0, 0, 2);
  const Eigen::RowVectorXd s30 = scalar_row(weights, x, x0, 3, 0);
  const Eigen::RowVectorXd s21 = scalar_row(weights, x, x0, 2, 1);
  const Eigen::RowVectorXd s12 = scalar_row(weights, x, x0, 1, 2);
  const Eigen::RowVectorXd s03 = scalar_row(weights, x, x0, 0, 3);

  ops.N = Eigen::MatrixXd::Zero(2, 2 * n);
  put(ops.N, 0, 0, s00);
  put(ops.N, 1, 1, s00);
  ops.Nphi = s00;

  ops.Beps = Eigen::MatrixXd::Zero(3, 2 * n);
  put(ops.Beps, 0, 0, s10);
  put(ops.Beps, 1, 1, s01);
  put(ops.Beps, 2, 0, s01);
  put(ops.Beps, 2, 1, s10);

  ops.Behat = Eigen::MatrixXd::Zero(4, 2 * n);
  put(ops.Behat, 0, 0, s10);
  put(ops.Behat, 1, 1, s01);
  put(ops.Behat, 2, 0, s01);
  put(ops.Behat, 3, 1, s10);

  ops.Bkap = Eigen::MatrixXd::Zero(6, 2 * n);
  put(ops.Bkap, 0, 0, s20);
  put(ops.Bkap, 1, 1, s02);
  put(ops.Bkap, 2, 0, s11, 2.0);
  put(ops.Bkap, 3, 1, s11, 2.0);
  put(ops.Bkap, 4, 0, s02);
  put(ops.Bkap, 5, 1, s20);

  ops.Bk1 = Eigen::MatrixXd::Zero(6, 2 * n);
  put(ops.Bk1, 0, 0, s30);
  put(ops.Bk1, 1, 1, s12);
  put(ops.Bk1, 2, 0, s21, 2.0);
  put(ops.Bk1, 3, 1, s21, 2.0);
  put(ops.Bk1, 4, 0, s12);
  put(ops.Bk1, 5, 1, s30);

  ops.Bk2 = Eigen::MatrixXd::Zero(6, 2 * n);
  put(ops.Bk2, 0, 0, s21);
  put(ops.Bk2, 1, 1, s03);
  put(ops.Bk2, 2, 0, s12, 2.0);
  put(ops.Bk2, 3, 1, s12, 2.0);
  put(ops.Bk2, 4, 0, s03);
  put(ops.Bk2, 5, 1, s21);

  ops.BE = Eigen::MatrixXd::Zero(2, n);
  ops.BE.row(0) = -s10;
  ops.BE.row(1) = -s01;
  ops.BE1 = Eigen::MatrixXd::Zero(2, n);
  ops.BE1.row(0) = -s20;
  ops.BE1.row(1) = -s11;
  ops.BE2 = Eigen::MatrixXd::Zero(2, n);
  ops.BE2.row(0) = -s11;
  ops.BE2.row(1) = -s02;

  return ops;
}

} // namespace fpm
