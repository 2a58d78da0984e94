#include "fpm/rbfdq.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace fpm {

namespace {

// Partial derivatives of f(x) = sqrt(|x - a|^2 + c^2) at x, up to third order.
double mq_partial(const Vec2& a, const Vec2& x, double c, int s, int t) {
  const double X = x.x() - a.x();
  const double Y = x.y() - a.y();
  const double q2 = X * X + Y * Y + c * c;
  const double q = std::sqrt(q2);
  const double q3 = q * q2;
  const double q5 = q3 * q2;
  switch (s * 10 + t) {
    case 0: return q;
    case 10: return X / q;
    case 1: return Y / q;
    case 20: return (Y * Y + c * c) / q3;
    case 11: return -X * Y / q3;
    case 2: return (X * X + c * c) / q3;
    case 30: return -3.0 * X * (Y * Y + c * c) / q5;
    case 21: return 2.0 * Y / q3 - 3.0 * Y * (Y * Y + c * c) / q5;
    case 12: return -X / q3 + 3.0 * X * Y * Y / q5;
    case 3: return -3.0 * Y * (X * X + c * c) / q5;
    default: throw Error("unsupported derivative order");
  }
}

struct Circle {
  Vec2 c{0, 0};
  double r2 = -1;
  bool contains(const Vec2& p) const { return (p - c).squaredNorm() <= r2 * (1 + 1e-12); }
};

Circle circle_two(const Vec2& a, const Vec2& b) {
  Circle cc;
  cc.c = 0.5 * (a + b);
  cc.r2 = (a - cc.c).squaredNorm();
  return cc;
}

Circle circle_three(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  if (std::abs(d) < 1e-300) {
    Circle best = circle_two(a, b);
    for (const auto& cand : {circle_two(a, c), circle_two(b, c)})
      if (cand.r2 > best.r2) best = cand;
    return best;
  }
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  const Vec2 rel((ac.y() * ab2 - ab.y() * ac2) / d, (ab.x() * ac2 - ac.x() * ab2) / d);
  Circle cc;
  cc.c = a + rel;
  cc.r2 = rel.squaredNorm();
  return cc;
}

Circle welzl(const std::vector<Vec2>& pts, size_t n, std::vector<Vec2>& boundary) {
  if (n == 0 || boundary.size() == 3) {
    switch (boundary.size()) {
      case 0: return Circle{};
      case 1: return Circle{boundary[0], 0};
      case 2: return circle_two(boundary[0], boundary[1]);
      default: return circle_three(boundary[0], boundary[1], boundary[2]);
    }
  }
  Circle c = welzl(pts, n - 1, boundary);
  if (c.r2 >= 0 && c.contains(pts[n - 1])) return c;
  boundary.push_back(pts[n - 1]);
  c = welzl(pts, n - 1, boundary);
  boundary.pop_back();
  return c;
}

} // namespace

double mq_shifted_basis(const Vec2& xi, const Vec2& x0, const Vec2& x, double c) {
  return mq_partial(xi, x, c, 0, 0) - mq_partial(x0, x, c, 0, 0);
}

double mq_derivative(const Vec2& xi, const Vec2& x0, const Vec2& x, double c, int s, int t) {
  if (s < 0 || t < 0 || s + t < 1 || s + t > 3) throw Error("derivative order out of range");
  return mq_partial(xi, x, c, s, t) - mq_partial(x0, x, c, s, t);
}

double min_enclosing_circle_diameter(const std::vector<Vec2>& pts) {
  if (pts.empty()) throw Error("empty point set");
  std::vector<Vec2> boundary;
  const Circle c = welzl(pts, pts.size(), boundary);
  return 2.0 * std::sqrt(std::max(c.r2, 0.0));
}

DQWeights build_weights(const SupportSet& support, const std::vector<Vec2>& coords, double c0,
                        double cond_limit) {
  const int m = support.m();
  if (m < 10) throw Error("insufficient support: m < 10");
  if (c0 <= 0) throw Error("c0 must be positive");

  const Vec2 x0 = coords[size_t(support.center)];
  std::vector<Vec2> sup(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) sup[size_t(i)] = coords[size_t(support.members[size_t(i)])];

  const double D0 = min_enclosing_circle_diameter(sup);
  if (D0 <= 0) throw Error("degenerate support set");

  // work in local coordinates (x - x0)/D0: the shape parameter becomes c0 and
  // the interpolation matrix is scale free
  std::vector<Vec2> loc(static_cast<size_t>(m) + 1);
  loc[0] = Vec2(0, 0);
  for (int i = 0; i < m; ++i) loc[size_t(i) + 1] = (sup[size_t(i)] - x0) / D0;

  const int n = m + 1;
  Eigen::MatrixXd G(n, n);
  G.row(0).setOnes();
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < n; ++i)
      G(j, i) = mq_shifted_basis(loc[size_t(j)], loc[0], loc[size_t(i)], c0);

  // analytic derivatives of each basis function, evaluated at the center P0
  static constexpr int kOrders[9][2] = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2},
                                        {3, 0}, {2, 1}, {1, 2}, {0, 3}};
  Eigen::MatrixXd DG(n, 9);
  DG.row(0).setZero();
  for (int j = 1; j < n; ++j)
    for (int d = 0; d < 9; ++d)
      DG(j, d) = mq_derivative(loc[size_t(j)], loc[0], loc[0], c0, kOrders[d][0], kOrders[d][1]);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(G);
  const double rcond = lu.rcond();
  const double cond = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond < cond_limit))
    throw Error("ill-conditioned support matrix (cond ~ " + std::to_string(cond) +
                "), consider changing c0");

  const Eigen::MatrixXd Bt = lu.solve(DG); // (m+1) x 9 in scaled coordinates

  DQWeights w;
  w.point_id = support.center;
  w.params = RBFParams{c0, D0, c0 * D0};
  w.cond_G = cond;
  w.weights.resize(9, n);
  for (int d = 0; d < 9; ++d) {
    const int order = kOrders[d][0] + kOrders[d][1];
    w.weights.row(d) = Bt.col(d).transpose() / std::pow(D0, order);
  }
  return w;
}

std::vector<DQWeights> build_all_weights(const PartitionedDomain& part,
                                         const std::vector<SupportSet>& supports, double c0,
                                         int threads, double cond_limit) {
  const int n = part.n_points();
  std::vector<DQWeights> all(static_cast<size_t>(n));
  threads = std::max(1, std::min(threads, n));

  std::exception_ptr fail;
  std::mutex fail_mutex;
  auto work = [&](int begin, int end) {
    try {
      for (int i = begin; i < end; ++i)
        all[size_t(i)] = build_weights(supports[size_t(i)], part.cloud.coords, c0, cond_limit);
    } catch (...) {
      std::lock_guard<std::mutex> lock(fail_mutex);
      if (!fail) fail = std::current_exception();
    }
  };

  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(work, t * chunk, std::min(n, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  if (fail) std::rethrow_exception(fail);
  return all;
}

} // namespace fpm
