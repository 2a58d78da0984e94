#include "fpm/assembly.hpp"

#include <mutex>
#include <thread>

namespace fpm {

EdgeGeometryMatrices::EdgeGeometryMatrices(const Vec2& n) {
  const double n_1 = n.x(), n_2 = n.y();
  n1 << n_1, 0, n_2, 0, n_2, n_1;
  n21 << n_1, 0, n_2, 0, 0, 0, 0, 0, 0, n_2, 0, n_1;
  n22 << 0, 0, n_1, 0, n_2, 0, 0, n_2, 0, n_1, 0, 0;
  n3 << n_1, 0, n_2, 0, 0, 0, 0, n_2, 0, n_1, 0, 0, 0, 0, n_1, 0, n_2, 0, 0, 0, 0, n_2, 0, n_1;
  n4 << n_1, 0, n_2, 0, 0, n_2, 0, n_1;
  s4 << n_2, 0, -n_1, 0, 0, -n_1, 0, n_2;
}

const Eigen::Matrix<double, 2, 4>& EdgeGeometryMatrices::c1() {
  static const Eigen::Matrix<double, 2, 4> m = [] {
    Eigen::Matrix<double, 2, 4> c;
    c << 1, 0, 0, 0, 0, 0, 0, 1;
    return c;
  }();
  return m;
}

const Eigen::Matrix<double, 2, 4>& EdgeGeometryMatrices::c2() {
  static const Eigen::Matrix<double, 2, 4> m = [] {
    Eigen::Matrix<double, 2, 4> c;
    c << 0, 0, 1, 0, 0, 1, 0, 0;
    return c;
  }();
  return m;
}

const Eigen::Matrix<double, 3, 6>& EdgeGeometryMatrices::c3() {
  static const Eigen::Matrix<double, 3, 6> m = [] {
    Eigen::Matrix<double, 3, 6> c;
    c << 1, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 0, 0, 0, 0, 0.5, 0, 0, 1;
    return c;
  }();
  return m;
}

const Eigen::Matrix<double, 3, 6>& EdgeGeometryMatrices::c4() {
  static const Eigen::Matrix<double, 3, 6> m = [] {
    Eigen::Matrix<double, 3, 6> c;
    c << 0, 0, 0.5, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0.5, 1, 0;
    return c;
  }();
  return m;
}

const EdgeBC& BCData::at(const Edge& edge) const {
  auto it = by_boundary.find(edge.boundary_id);
  if (it == by_boundary.end())
    throw Error("missing boundary condition for boundary segment " +
                std::to_string(edge.boundary_id));
  return it->second;
}

double GlobalSystem::symmetry_error() const {
  Eigen::SparseMatrix<double> Kt = K.transpose();
  Eigen::SparseMatrix<double> diff = K - Kt;
  double dmax = 0, kmax = 0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
      dmax = std::max(dmax, std::abs(it.value()));
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      kmax = std::max(kmax, std::abs(it.value()));
  return kmax > 0 ? dmax / kmax : 0.0;
}

void DenseBlock::init(const GlobalSystem& sys, const std::vector<int>& pts_a,
                      const std::vector<int>& pts_b) {
  udofs.clear();
  pdofs.clear();
  for (const auto* pts : {&pts_a, &pts_b})
    for (int p : *pts) {
      udofs.push_back(sys.u_dof(p, 0));
      udofs.push_back(sys.u_dof(p, 1));
      pdofs.push_back(sys.phi_dof(p));
    }
  const int nu = int(udofs.size()), np = int(pdofs.size());
  Kuu = Eigen::MatrixXd::Zero(nu, nu);
  Kup = Eigen::MatrixXd::Zero(nu, np);
  Kpp = Eigen::MatrixXd::Zero(np, np);
  fu = Eigen::VectorXd::Zero(nu);
  fp = Eigen::VectorXd::Zero(np);
}

std::vector<std::pair<Vec2, double>> quadrature_points(const Subdomain& cell) {
  const Polygon& poly = cell.polygon;
  if (poly.size() < 3 || cell.area <= 0) throw Error("degenerate cell polygon");
  std::vector<std::pair<Vec2, double>> pts;

  if (poly.size() == 4) {
    // bilinear 2x2 Gauss
    const double g = 1.0 / std::sqrt(3.0);
    for (double eta : {-g, g})
      for (double xi : {-g, g}) {
        const double N0 = 0.25 * (1 - xi) * (1 - eta), N1 = 0.25 * (1 + xi) * (1 - eta);
        const double N2 = 0.25 * (1 + xi) * (1 + eta), N3 = 0.25 * (1 - xi) * (1 + eta);
        const Vec2 x = N0 * poly[0] + N1 * poly[1] + N2 * poly[2] + N3 * poly[3];
        const Vec2 dxi = 0.25 * (-(1 - eta) * poly[0] + (1 - eta) * poly[1] +
                                 (1 + eta) * poly[2] - (1 + eta) * poly[3]);
        const Vec2 deta = 0.25 * (-(1 - xi) * poly[0] - (1 + xi) * poly[1] +
                                  (1 + xi) * poly[2] + (1 - xi) * poly[3]);
        const double jac = dxi.x() * deta.y() - dxi.y() * deta.x();
        if (jac <= 0) throw Error("negative Jacobian in quadrilateral cell");
        pts.emplace_back(x, jac);
      }
    return pts;
  }

  // centroid fan with the degree-2 midpoint rule per triangle
  const Vec2 c = polygon_centroid(poly);
  for (size_t k = 0; k < poly.size(); ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % poly.size()];
    const double area = 0.5 * ((a - c).x() * (b - c).y() - (a - c).y() * (b - c).x());
    if (area <= 0) throw Error("non-convex or non-CCW cell polygon");
    pts.emplace_back(0.5 * (c + a), area / 3.0);
    pts.emplace_back(0.5 * (a + b), area / 3.0);
    pts.emplace_back(0.5 * (b + c), area / 3.0);
  }
  return pts;
}

std::pair<Vec2, double> edge_quadrature(const Edge& edge) {
  return {0.5 * (edge.a + edge.b), edge.length};
}

namespace {

// symmetric insertion patterns: a consistency term together with its transpose
// partner, or a single self-adjoint term symmetrized exactly
void add_pair(Eigen::MatrixXd& K, const Eigen::MatrixXd& M, double sign = 1.0) {
  K.noalias() += sign * M;
  K.noalias() += sign * M.transpose();
}
void add_sym(Eigen::MatrixXd& K, const Eigen::MatrixXd& M, double sign = 1.0) {
  K.noalias() += (0.5 * sign) * M;
  K.noalias() += (0.5 * sign) * M.transpose();
}

Eigen::Matrix2d selector(const std::array<bool, 2>& flags) {
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  P(0, 0) = flags[0] ? 1.0 : 0.0;
  P(1, 1) = flags[1] ? 1.0 : 0.0;
  return P;
}

Vec2 eval_or_zero(const VectorFn& fn, const Vec2& x) { return fn ? fn(x) : Vec2(0, 0); }
double eval_or_zero(const ScalarFn& fn, const Vec2& x) { return fn ? fn(x) : 0.0; }

} // namespace

Assembler::Assembler(const PartitionedDomain& part, const std::vector<SupportSet>& supports,
                     const std::vector<DQWeights>& weights, const ConstitutiveSet& set,
                     const BCData& bcs, const PenaltyParams& penalties)
    : part_(part), supports_(supports), weights_(weights), set_(set), bcs_(bcs),
      pen_(penalties) {
  proto_.npoints = part.n_points();
}

CellOperators Assembler::ops_at(int cell, const Vec2& x) const {
  return derivative_operators(part_.cells[size_t(cell)], supports_[size_t(cell)],
                              weights_[size_t(cell)], part_.point(cell), x);
}

DenseBlock Assembler::cell_stiffness(int cell_id) const {
  const auto& sup = supports_[size_t(cell_id)];
  std::vector<int> pts;
  pts.push_back(sup.center);
  pts.insert(pts.end(), sup.members.begin(), sup.members.end());

  DenseBlock blk;
  blk.init(proto_, pts, {});

  for (const auto& [x, w] : quadrature_points(part_.cells[size_t(cell_id)])) {
    const CellOperators ops = ops_at(cell_id, x);
    add_sym(blk.Kuu, w * (ops.Beps.transpose() * (set_.Dse * ops.Beps)));
    add_sym(blk.Kuu, w * (ops.Bkap.transpose() * (set_.Dmk * ops.Bkap)));
    add_pair(blk.Kuu, w * (ops.Beps.transpose() * (set_.G0 * ops.Bkap)), -1.0);
    blk.Kup.noalias() -=
        w * ((ops.Beps.transpose() * set_.e_mat.transpose() + ops.Bkap.transpose() * set_.A0) *
             ops.BE);
    add_sym(blk.Kpp, w * (ops.BE.transpose() * (set_.kbar * ops.BE)), -1.0);
    if (body_force) blk.fu.noalias() += w * (ops.N.transpose() * body_force(x));
    if (free_charge) blk.fp.noalias() -= w * (ops.Nphi.transpose() * free_charge(x));
  }
  return blk;
}

DenseBlock Assembler::internal_edge_stiffness(const Edge& edge) const {
  const int cl = edge.left_cell, cr = edge.right_cell;
  const auto [mid, w] = edge_quadrature(edge);
  const double he = edge.h_e;
  const CellOperators L = ops_at(cl, mid);
  const CellOperators R = ops_at(cr, mid);

  DenseBlock blk;
  blk.init(proto_, L.point_ids, R.point_ids);
  const int nuL = int(L.N.cols()), nuR = int(R.N.cols());
  const int npL = int(L.Nphi.cols()), npR = int(R.Nphi.cols());

  auto ext_u = [&](const Eigen::MatrixXd& ML, const Eigen::MatrixXd& MR, double sR) {
    Eigen::MatrixXd M(ML.rows(), nuL + nuR);
    M.leftCols(nuL) = ML;
    M.rightCols(nuR) = sR * MR;
    return M;
  };
  auto ext_p = [&](const Eigen::MatrixXd& ML, const Eigen::MatrixXd& MR, double sR) {
    Eigen::MatrixXd M(ML.rows(), npL + npR);
    M.leftCols(npL) = ML;
    M.rightCols(npR) = sR * MR;
    return M;
  };

  // jumps and averages of every trace quantity entering the flux terms
  const Eigen::MatrixXd Ju = ext_u(L.N, R.N, -1.0);
  const Eigen::MatrixXd Jehat = ext_u(L.Behat, R.Behat, -1.0);
  const Eigen::MatrixXd Aeps = 0.5 * ext_u(L.Beps, R.Beps, 1.0);
  const Eigen::MatrixXd Akap = 0.5 * ext_u(L.Bkap, R.Bkap, 1.0);
  const Eigen::MatrixXd Ak1 = 0.5 * ext_u(L.Bk1, R.Bk1, 1.0);
  const Eigen::MatrixXd Ak2 = 0.5 * ext_u(L.Bk2, R.Bk2, 1.0);
  const Eigen::MatrixXd Jphi = ext_p(L.Nphi, R.Nphi, -1.0);
  const Eigen::MatrixXd AE = 0.5 * ext_p(L.BE, R.BE, 1.0);
  const Eigen::MatrixXd AE1 = 0.5 * ext_p(L.BE1, R.BE1, 1.0);
  const Eigen::MatrixXd AE2 = 0.5 * ext_p(L.BE2, R.BE2, 1.0);

  const EdgeGeometryMatrices g(edge.normal);
  const auto& c3 = EdgeGeometryMatrices::c3();
  const auto& c4 = EdgeGeometryMatrices::c4();
  const Eigen::Vector2d nv(edge.normal.x(), edge.normal.y());

  const Eigen::Matrix<double, 2, 6> X5 =
      g.n1 * set_.G0 - g.n21 * (set_.G0.transpose() * c3) - g.n22 * (set_.G0.transpose() * c4);

  add_pair(blk.Kuu, w * (Ju.transpose() * (X5 * Akap)));
  blk.Kup.noalias() -= w * (Ju.transpose() * (g.n21 * (set_.A0 * AE1)));
  blk.Kup.noalias() -= w * (Ju.transpose() * (g.n22 * (set_.A0 * AE2)));
  add_pair(blk.Kuu, w * (Ju.transpose() * ((g.n1 * set_.Dse) * Aeps)), -1.0);
  add_pair(blk.Kuu, w * (Ju.transpose() * ((g.n21 * set_.Dmk) * Ak1)));
  add_pair(blk.Kuu, w * (Ju.transpose() * ((g.n22 * set_.Dmk) * Ak2)));
  blk.Kup.noalias() += w * (Ju.transpose() * ((g.n1 * set_.e_mat.transpose()) * AE));
  add_pair(blk.Kuu, w * (Jehat.transpose() * ((g.n3 * set_.Dmk) * Akap)), -1.0);
  add_pair(blk.Kuu, w * (Jehat.transpose() * ((g.n3 * set_.G0.transpose()) * Aeps)));
  blk.Kup.noalias() += w * (Jehat.transpose() * ((g.n3 * set_.A0) * AE));
  blk.Kup.noalias() -=
      w * ((Aeps.transpose() * set_.e_mat.transpose() + Akap.transpose() * set_.A0) *
           (nv * Jphi));
  add_pair(blk.Kpp, w * (Jphi.transpose() * ((nv.transpose() * set_.kbar) * AE)), -1.0);

  // penalties; the potential-block penalties are negative so they stabilize
  // the negated dielectric block
  add_sym(blk.Kuu, (w * pen_.eta21 / he) * (Ju.transpose() * Ju));
  add_sym(blk.Kuu,
          (w * pen_.eta22 * he) * (Jehat.transpose() * ((g.n4.transpose() * g.n4) * Jehat)));
  add_sym(blk.Kpp, (w * pen_.eta23 / he) * (Jphi.transpose() * Jphi), -1.0);

  return blk;
}

DenseBlock Assembler::essential_bc_stiffness(const Edge& edge) const {
  const EdgeBC& bc = bcs_.at(edge);
  DenseBlock blk;
  const bool any_u = bc.u_essential[0] || bc.u_essential[1];
  const bool any_d = bc.d_essential[0] || bc.d_essential[1];
  if (!any_u && !any_d && !bc.phi_essential) {
    blk.init(proto_, {}, {});
    return blk;
  }

  const int cl = edge.left_cell;
  const auto [mid, w] = edge_quadrature(edge);
  const double he = edge.h_e;
  const CellOperators L = ops_at(cl, mid);
  blk.init(proto_, L.point_ids, {});

  const EdgeGeometryMatrices g(edge.normal);
  const auto& c1 = EdgeGeometryMatrices::c1();
  const auto& c2 = EdgeGeometryMatrices::c2();
  const auto& c3 = EdgeGeometryMatrices::c3();
  const auto& c4 = EdgeGeometryMatrices::c4();
  const Eigen::Vector2d nv(edge.normal.x(), edge.normal.y());

  if (any_u) {
    const Eigen::Matrix2d P = selector(bc.u_essential);
    const Eigen::Vector2d ut = P * Eigen::Vector2d(eval_or_zero(bc.u_data, mid));
    const Eigen::MatrixXd NP = L.N.transpose() * P; // 2n x 2

    const Eigen::Matrix<double, 2, 6> X5 = g.n1 * set_.G0 -
                                           g.n21 * (set_.G0.transpose() * c3) -
                                           g.n22 * (set_.G0.transpose() * c4);
    const Eigen::Matrix<double, 2, 4> ss1 = c1 * (g.s4.transpose() * g.s4);
    const Eigen::Matrix<double, 2, 4> ss2 = c2 * (g.s4.transpose() * g.s4);
    const Eigen::Matrix<double, 2, 6> Y15 = ss1 * (g.n3 * (set_.G0.transpose() * c3)) +
                                            ss2 * (g.n3 * (set_.G0.transpose() * c4));

    add_pair(blk.Kuu, w * (NP * (X5 * L.Bkap)));
    blk.Kup.noalias() -= w * (NP * (g.n21 * (set_.A0 * L.BE1) + g.n22 * (set_.A0 * L.BE2)));
    add_pair(blk.Kuu, w * (NP * ((g.n1 * set_.Dse) * L.Beps)), -1.0);
    add_pair(blk.Kuu, w * (NP * ((g.n21 * set_.Dmk) * L.Bk1)));
    add_pair(blk.Kuu, w * (NP * ((g.n22 * set_.Dmk) * L.Bk2)));
    blk.Kup.noalias() += w * (NP * ((g.n1 * set_.e_mat.transpose()) * L.BE));
    add_pair(blk.Kuu, w * (NP * ((ss1 * (g.n3 * set_.Dmk)) * L.Bk1)));
    add_pair(blk.Kuu, w * (NP * ((ss2 * (g.n3 * set_.Dmk)) * L.Bk2)));
    add_pair(blk.Kuu, w * (NP * (Y15 * L.Bkap)), -1.0);
    blk.Kup.noalias() -=
        w * (NP * (ss1 * (g.n3 * (set_.A0 * L.BE1)) + ss2 * (g.n3 * (set_.A0 * L.BE2))));
    add_sym(blk.Kuu, (w * pen_.eta11 / he) * (NP * L.N));

    // data counterparts of every term whose trial slot is the bare trace
    blk.fu.noalias() -= w * (L.Beps.transpose() * (set_.Dse * (g.n1.transpose() * ut)));
    blk.fu.noalias() += w * (L.Bkap.transpose() * (X5.transpose() * ut));
    blk.fu.noalias() +=
        w *
        (L.Bk1.transpose() *
             (set_.Dmk * (g.n21.transpose() + g.n3.transpose() * ss1.transpose())) +
         L.Bk2.transpose() *
             (set_.Dmk * (g.n22.transpose() + g.n3.transpose() * ss2.transpose()))) *
        ut;
    blk.fu.noalias() -= w * (L.Bkap.transpose() * (Y15.transpose() * ut));
    blk.fu.noalias() += (w * pen_.eta11 / he) * (L.N.transpose() * ut);
    blk.fp.noalias() += w * (L.BE.transpose() * (set_.e_mat * (g.n1.transpose() * ut)));
    blk.fp.noalias() -=
        w *
        (L.BE1.transpose() *
             (set_.A0.transpose() * (g.n21.transpose() + g.n3.transpose() * ss1.transpose())) +
         L.BE2.transpose() *
             (set_.A0.transpose() * (g.n22.transpose() + g.n3.transpose() * ss2.transpose()))) *
        ut;
  }

  if (any_d) {
    const Eigen::Matrix2d Pd = selector(bc.d_essential);
    const Eigen::Vector2d dt = Pd * Eigen::Vector2d(eval_or_zero(bc.d_data, mid));
    const Eigen::MatrixXd EP = L.Behat.transpose() * (g.n4.transpose() * Pd); // 2n x 2
    const Eigen::Matrix<double, 2, 6> nn3 = g.n4 * g.n3;

    add_pair(blk.Kuu, w * (EP * ((nn3 * set_.Dmk) * L.Bkap)), -1.0);
    add_pair(blk.Kuu, w * (EP * ((nn3 * set_.G0.transpose()) * L.Beps)));
    blk.Kup.noalias() += w * (EP * ((nn3 * set_.A0) * L.BE));
    add_sym(blk.Kuu, (w * pen_.eta12 * he) * (EP * (Pd * (g.n4 * L.Behat))));

    blk.fu.noalias() -= w * ((L.Bkap.transpose() * set_.Dmk - L.Beps.transpose() * set_.G0) *
                             (nn3.transpose() * dt));
    blk.fp.noalias() += w * (L.BE.transpose() * (set_.A0.transpose() * (nn3.transpose() * dt)));
    blk.fu.noalias() += (w * pen_.eta12 * he) * (L.Behat.transpose() * (g.n4.transpose() * dt));
  }

  if (bc.phi_essential) {
    const double pt = eval_or_zero(bc.phi_data, mid);
    add_pair(blk.Kpp, w * (L.Nphi.transpose() * ((nv.transpose() * set_.kbar) * L.BE)), -1.0);
    const Eigen::MatrixXd Mcp =
        w * (L.Nphi.transpose() *
             (nv.transpose() * (set_.e_mat * L.Beps + set_.A0.transpose() * L.Bkap)));
    blk.Kup.noalias() -= Mcp.transpose();
    add_sym(blk.Kpp, (w * pen_.eta13 / he) * (L.Nphi.transpose() * L.Nphi), -1.0);

    blk.fp.noalias() -= (w * pt) * (L.BE.transpose() * (set_.kbar * nv));
    blk.fp.noalias() -= (w * pen_.eta13 / he) * pt * L.Nphi.transpose();
    blk.fu.noalias() -=
        (w * pt) *
        ((L.Beps.transpose() * set_.e_mat.transpose() + L.Bkap.transpose() * set_.A0) * nv);
  }

  return blk;
}

DenseBlock Assembler::natural_bc_load(const Edge& edge) const {
  const EdgeBC& bc = bcs_.at(edge);
  const int cl = edge.left_cell;
  const auto [mid, w] = edge_quadrature(edge);
  const CellOperators L = ops_at(cl, mid);

  DenseBlock blk;
  blk.init(proto_, L.point_ids, {});

  const Eigen::Matrix2d Qsel = Eigen::Matrix2d::Identity() - selector(bc.u_essential);
  const Eigen::Vector2d Qt = Qsel * Eigen::Vector2d(eval_or_zero(bc.Q_data, mid));
  blk.fu.noalias() += w * (L.N.transpose() * Qt);

  const EdgeGeometryMatrices g(edge.normal);
  const Eigen::Matrix2d Rsel = Eigen::Matrix2d::Identity() - selector(bc.d_essential);
  const Eigen::Vector2d Rt = Rsel * Eigen::Vector2d(eval_or_zero(bc.R_data, mid));
  blk.fu.noalias() += w * (L.Behat.transpose() * (g.n4.transpose() * Rt));

  if (!bc.phi_essential) {
    const double om = eval_or_zero(bc.omega_data, mid);
    blk.fp.noalias() -= (w * om) * L.Nphi.transpose();
  }
  return blk;
}

namespace {

void scatter(const DenseBlock& blk, std::vector<Eigen::Triplet<double>>& trips,
             Eigen::VectorXd& f) {
  const int nu = int(blk.udofs.size()), np = int(blk.pdofs.size());
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nu; ++j)
      trips.emplace_back(blk.udofs[size_t(i)], blk.udofs[size_t(j)], blk.Kuu(i, j));
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < np; ++j) {
      trips.emplace_back(blk.udofs[size_t(i)], blk.pdofs[size_t(j)], blk.Kup(i, j));
      trips.emplace_back(blk.pdofs[size_t(j)], blk.udofs[size_t(i)], blk.Kup(i, j));
    }
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      trips.emplace_back(blk.pdofs[size_t(i)], blk.pdofs[size_t(j)], blk.Kpp(i, j));
  for (int i = 0; i < nu; ++i) f[blk.udofs[size_t(i)]] += blk.fu[i];
  for (int i = 0; i < np; ++i) f[blk.pdofs[size_t(i)]] += blk.fp[i];
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr fail;
  std::mutex fail_mutex;
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int b = t * chunk, e = std::min(n, (t + 1) * chunk);
    pool.emplace_back([&, b, e] {
      try {
        for (int i = b; i < e; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (!fail) fail = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (fail) std::rethrow_exception(fail);
}

} // namespace

GlobalSystem Assembler::assemble(int threads) const {
  GlobalSystem sys;
  sys.npoints = part_.n_points();
  sys.f = Eigen::VectorXd::Zero(sys.ndof());

  const int ncells = int(part_.cells.size());
  const int nedges = int(part_.edges.size());

  // blocks are computed in parallel but scattered in a fixed order, so the
  // assembled system is identical for any worker count
  std::vector<DenseBlock> cell_blocks(static_cast<size_t>(ncells));
  parallel_for(ncells, threads, [&](int c) { cell_blocks[size_t(c)] = cell_stiffness(c); });

  std::vector<DenseBlock> edge_blocks(static_cast<size_t>(nedges));
  std::vector<DenseBlock> load_blocks(static_cast<size_t>(nedges));
  parallel_for(nedges, threads, [&](int e) {
    const Edge& edge = part_.edges[size_t(e)];
    if (edge.kind == EdgeKind::Internal) {
      edge_blocks[size_t(e)] = internal_edge_stiffness(edge);
    } else {
      edge_blocks[size_t(e)] = essential_bc_stiffness(edge);
      load_blocks[size_t(e)] = natural_bc_load(edge);
    }
  });

  std::vector<Eigen::Triplet<double>> trips;
  size_t nnz_guess = 0;
  for (const auto& b : cell_blocks) nnz_guess += (b.udofs.size() + b.pdofs.size()) * 3;
  trips.reserve(nnz_guess * 16);

  for (const auto& b : cell_blocks) scatter(b, trips, sys.f);
  for (const auto& b : edge_blocks) scatter(b, trips, sys.f);
  for (const auto& b : load_blocks) scatter(b, trips, sys.f);

  sys.K.resize(sys.ndof(), sys.ndof());
  sys.K.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

GlobalSystem assemble(const PartitionedDomain& part, const std::vector<SupportSet>& supports,
                      const std::vector<DQWeights>& weights, const ConstitutiveSet& set,
                      const BCData& bcs, const PenaltyParams& penalties, int threads) {
  Assembler a(part, supports, weights, set, bcs, penalties);
  return a.assemble(threads);
}

} // namespace fpm
