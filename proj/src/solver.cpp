#include "fpm/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace fpm {

ReducedSystem apply_constraints(const GlobalSystem& sys, const ConstraintSet& constraints) {
  const int n = sys.ndof();
  enum class Kind { Free, Slave, Fixed };
  std::vector<Kind> kind(static_cast<size_t>(n), Kind::Free);
  std::vector<int> master(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) master[size_t(i)] = i;
  std::vector<double> value(static_cast<size_t>(n), 0.0);

  auto claim = [&](int dof) {
    if (dof < 0 || dof >= n) throw Error("constraint DOF out of range");
    if (kind[size_t(dof)] != Kind::Free || master[size_t(dof)] != dof)
      throw Error("constraint sets overlap on DOF " + std::to_string(dof));
  };

  for (const auto& group : constraints.groups) {
    if (group.size() < 2) throw Error("tie group needs at least two DOFs");
    const int m = group.front();
    claim(m);
    for (size_t k = 1; k < group.size(); ++k) {
      claim(group[k]);
      kind[size_t(group[k])] = Kind::Slave;
      master[size_t(group[k])] = m;
    }
  }
  for (const auto& [dof, val] : constraints.fixed) {
    claim(dof);
    kind[size_t(dof)] = Kind::Fixed;
    value[size_t(dof)] = val;
  }

  std::vector<int> red_index(static_cast<size_t>(n), -1);
  int nr = 0;
  for (int i = 0; i < n; ++i)
    if (kind[size_t(i)] == Kind::Free) red_index[size_t(i)] = nr++;

  ReducedSystem red;
  red.T.resize(n, nr);
  red.g = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    switch (kind[size_t(i)]) {
      case Kind::Free: trips.emplace_back(i, red_index[size_t(i)], 1.0); break;
      case Kind::Slave: trips.emplace_back(i, red_index[size_t(master[size_t(i)])], 1.0); break;
      case Kind::Fixed: red.g[i] = value[size_t(i)]; break;
    }
  }
  red.T.setFromTriplets(trips.begin(), trips.end());
  red.K = red.T.transpose() * sys.K * red.T;
  red.f = red.T.transpose() * (sys.f - sys.K * red.g);
  return red;
}

namespace {

[[noreturn]] void underconstrained_error(const GlobalSystem& sys, const std::string& reason) {
  // probe the usual rigid/constant modes and report which are (near) null
  const int np = sys.npoints;
  const int n = sys.ndof();
  std::vector<std::pair<std::string, Eigen::VectorXd>> modes;
  Eigen::VectorXd v;

  v = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < np; ++p) v[sys.u_dof(p, 0)] = 1.0;
  modes.emplace_back("u1-translation", v);
  v = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < np; ++p) v[sys.u_dof(p, 1)] = 1.0;
  modes.emplace_back("u2-translation", v);
  v = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < np; ++p) v[sys.phi_dof(p)] = 1.0;
  modes.emplace_back("constant-potential", v);

  double kmax = 0;
  for (int k = 0; k < sys.K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, k); it; ++it)
      kmax = std::max(kmax, std::abs(it.value()));

  std::string msg = "underconstrained problem (" + reason + "); near-null vectors:";
  bool any = false;
  for (const auto& [name, mode] : modes) {
    const double r = (sys.K * mode).cwiseAbs().maxCoeff() / (kmax > 0 ? kmax : 1.0);
    if (r < 1e-8) {
      msg += " " + name;
      any = true;
    }
  }
  if (!any) msg += " (none of the probed modes)";
  throw Error(msg);
}

} // namespace

Solution solve(const GlobalSystem& sys, const ConstraintSet& constraints, double tol) {
  ReducedSystem red = apply_constraints(sys, constraints);
  const int nr = int(red.K.rows());
  if (nr == 0) throw Error("empty system");

  // symmetric diagonal equilibration keeps the mechanical, electric and
  // penalty scales comparable inside the factorization; rounding the scale
  // factors to powers of two keeps the scaled system exactly equivalent
  Eigen::VectorXd dia = Eigen::VectorXd::Ones(nr);
  for (int k = 0; k < red.K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(red.K, k); it; ++it)
      if (it.row() == it.col() && it.value() != 0) dia[it.row()] = std::abs(it.value());
  Eigen::VectorXd d(nr);
  for (int i = 0; i < nr; ++i)
    d[i] = std::exp2(std::round(-0.5 * std::log2(dia[i])));

  Eigen::SparseMatrix<double> Ks = d.asDiagonal() * red.K * d.asDiagonal();
  Eigen::VectorXd fs = d.asDiagonal() * red.f;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(Ks);
  if (lu.info() != Eigen::Success) underconstrained_error(sys, "factorization failed");

  Eigen::VectorXd xs = lu.solve(fs);
  if (!xs.allFinite()) underconstrained_error(sys, "non-finite solution");

  // iterative refinement with extended-precision residuals recovers the
  // forward accuracy that the large penalty spread otherwise destroys
  const double fsnorm = fs.norm();
  double prev = std::numeric_limits<double>::max();
  for (int pass = 0; pass < 12; ++pass) {
    Eigen::VectorXd r(nr);
    for (int col = 0; col < nr; ++col) r[col] = 0;
    std::vector<long double> acc(static_cast<size_t>(nr), 0.0L);
    for (int k = 0; k < Ks.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ks, k); it; ++it)
        acc[size_t(it.row())] += static_cast<long double>(it.value()) *
                                 static_cast<long double>(xs[it.col()]);
    for (int i = 0; i < nr; ++i)
      r[i] = double(static_cast<long double>(fs[i]) - acc[size_t(i)]);
    const double rn = r.norm();
    if (rn <= 1e-18 * fsnorm || rn >= prev) break;
    prev = rn;
    xs += lu.solve(r);
  }
  if (!xs.allFinite()) underconstrained_error(sys, "non-finite solution");

  Eigen::VectorXd xr = d.asDiagonal() * xs;

  Solution sol;
  sol.x = red.T * xr + red.g;
  // residual of the condensed system: the full-system residual at constrained
  // DOFs is the reaction force, not an error
  const double fnorm = red.f.norm();
  const double rnorm = (red.K * xr - red.f).norm();
  sol.residual_norm = fnorm > 0 ? rnorm / fnorm : rnorm;
  if (!(sol.residual_norm <= tol))
    underconstrained_error(sys, "relative residual " + std::to_string(sol.residual_norm) +
                                    " above tolerance");

  sol.ubar = sol.x.head(2 * sys.npoints);
  sol.phibar = sol.x.tail(sys.npoints);
  return sol;
}

} // namespace fpm
