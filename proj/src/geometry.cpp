#include "fpm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace fpm {

double polygon_area(const Polygon& poly) {
  double s = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

Vec2 polygon_centroid(const Polygon& poly) {
  double a = 0;
  Vec2 c(0, 0);
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double cross = p.x() * q.y() - q.x() * p.y();
    a += cross;
    c += cross * (p + q);
  }
  if (std::abs(a) < std::numeric_limits<double>::min())
    throw Error("polygon_centroid: degenerate polygon");
  return c / (3.0 * a);
}

bool polygon_is_convex(const Polygon& poly, double tol) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 d1 = poly[(i + 1) % n] - poly[i];
    const Vec2 d2 = poly[(i + 2) % n] - poly[(i + 1) % n];
    if (d1.x() * d2.y() - d1.y() * d2.x() < -tol) return false;
  }
  return true;
}

bool point_in_polygon(const Vec2& p, const Polygon& poly) {
  // winding by crossing count
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xint = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < xint) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

Polygon Rect::outline() const {
  return {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

namespace {

double outline_diameter(const Polygon& poly) {
  double d2 = 0;
  for (size_t i = 0; i < poly.size(); ++i)
    for (size_t j = i + 1; j < poly.size(); ++j)
      d2 = std::max(d2, (poly[i] - poly[j]).squaredNorm());
  return std::sqrt(d2);
}

void require_convex_outline(const Polygon& outline, double scale) {
  if (outline.size() < 3) throw Error("outline must have at least 3 vertices");
  if (polygon_area(outline) <= 0) throw Error("outline must be CCW with positive area");
  if (!polygon_is_convex(outline, 1e-12 * scale * scale))
    throw Error("non-convex outlines are not supported");
}

// Polygon vertex with provenance of the edge *starting* at it:
// src >= 0 : bisector / lattice edge facing neighbor cell `src`
// src <  0 : outline segment -(src+1)
struct LVertex {
  Vec2 p;
  int src;
};
using LPoly = std::vector<LVertex>;

LPoly label_outline(const Polygon& outline) {
  LPoly lp;
  lp.reserve(outline.size());
  for (size_t k = 0; k < outline.size(); ++k)
    lp.push_back({outline[k], -int(k) - 1});
  return lp;
}

// Keep the side s(x) = (x - origin).dot(nrm) <= 0. New cut edges get label `cutlab`.
LPoly clip_halfplane(const LPoly& poly, const Vec2& origin, const Vec2& nrm, int cutlab,
                     double eps) {
  LPoly out;
  const size_t n = poly.size();
  if (n == 0) return out;
  std::vector<double> side(n, 0.0);
  for (size_t i = 0; i < n; ++i) side[i] = (poly[i].p - origin).dot(nrm);

  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const bool in_i = side[i] <= eps;
    const bool in_j = side[j] <= eps;
    if (in_i) {
      out.push_back(poly[i]);
      if (!in_j) {
        const double t = side[i] / (side[i] - side[j]);
        out.push_back({poly[i].p + t * (poly[j].p - poly[i].p), cutlab});
      }
    } else if (in_j) {
      const double t = side[i] / (side[i] - side[j]);
      out.push_back({poly[i].p + t * (poly[j].p - poly[i].p), poly[i].src});
    }
  }
  // drop zero-length edges created by grazing cuts
  LPoly dedup;
  for (size_t i = 0; i < out.size(); ++i) {
    const size_t j = (i + 1) % out.size();
    if ((out[i].p - out[j].p).norm() > eps) dedup.push_back(out[i]);
  }
  return dedup;
}

struct BucketGrid {
  double x0, y0, cell;
  int nx, ny;
  std::vector<std::vector<int>> buckets;

  BucketGrid(const std::vector<Vec2>& pts, const Polygon& outline) {
    double xmin = outline[0].x(), xmax = xmin, ymin = outline[0].y(), ymax = ymin;
    for (const auto& v : outline) {
      xmin = std::min(xmin, v.x());
      xmax = std::max(xmax, v.x());
      ymin = std::min(ymin, v.y());
      ymax = std::max(ymax, v.y());
    }
    const double w = std::max(xmax - xmin, 1e-300), h = std::max(ymax - ymin, 1e-300);
    const double target = std::sqrt(w * h / std::max<size_t>(pts.size(), 1));
    x0 = xmin;
    y0 = ymin;
    cell = target;
    nx = std::max(1, int(std::ceil(w / cell)));
    ny = std::max(1, int(std::ceil(h / cell)));
    buckets.assign(size_t(nx) * size_t(ny), {});
    for (size_t i = 0; i < pts.size(); ++i) buckets[index_of(pts[i])].push_back(int(i));
  }

  size_t index_of(const Vec2& p) const {
    int ix = std::clamp(int((p.x() - x0) / cell), 0, nx - 1);
    int iy = std::clamp(int((p.y() - y0) / cell), 0, ny - 1);
    return size_t(iy) * size_t(nx) + size_t(ix);
  }

  // all point ids within `radius` of p, sorted by (distance, id)
  std::vector<int> within(const Vec2& p, double radius, const std::vector<Vec2>& pts) const {
    const int r = int(std::ceil(radius / cell)) + 1;
    const int cx = std::clamp(int((p.x() - x0) / cell), 0, nx - 1);
    const int cy = std::clamp(int((p.y() - y0) / cell), 0, ny - 1);
    std::vector<std::pair<double, int>> found;
    for (int iy = std::max(0, cy - r); iy <= std::min(ny - 1, cy + r); ++iy)
      for (int ix = std::max(0, cx - r); ix <= std::min(nx - 1, cx + r); ++ix)
        for (int id : buckets[size_t(iy) * size_t(nx) + size_t(ix)]) {
          const double d2 = (pts[size_t(id)] - p).squaredNorm();
          if (d2 <= radius * radius) found.emplace_back(d2, id);
        }
    std::sort(found.begin(), found.end());
    std::vector<int> ids;
    ids.reserve(found.size());
    for (auto& [d2, id] : found) ids.push_back(id);
    return ids;
  }
};

double max_vertex_dist(const LPoly& poly, const Vec2& p) {
  double d2 = 0;
  for (const auto& v : poly) d2 = std::max(d2, (v.p - p).squaredNorm());
  return std::sqrt(d2);
}

Vec2 segment_right_normal(const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  const double len = d.norm();
  if (len == 0) throw Error("degenerate edge segment");
  return Vec2(d.y(), -d.x()) / len;
}

// Shared edge-building pass over labeled cell polygons. `neighbor_of(cell, lab)`
// resolves a nonnegative label to a neighbor cell id (or -1 when the neighbor
// does not exist and the edge must be external), `outline_seg(cell, lab)` maps
// labels to outline segment ids for external edges.
void build_edges(PartitionedDomain& part, const std::vector<LPoly>& polys,
                 const std::vector<int>& label_to_cell, const Polygon& outline, double eps) {
  const int ncells = int(part.cells.size());
  part.cell_edges.assign(size_t(ncells), {});
  part.neighbors.assign(size_t(ncells), {});

  for (int ci = 0; ci < ncells; ++ci) {
    const LPoly& poly = polys[size_t(ci)];
    const size_t n = poly.size();
    for (size_t k = 0; k < n; ++k) {
      const size_t k2 = (k + 1) % n;
      const Vec2& a = poly[k].p;
      const Vec2& b = poly[k2].p;
      const double len = (b - a).norm();
      if (len <= eps) continue;
      int lab = poly[k].src;
      int nb = -1;
      if (lab >= 0) nb = label_to_cell.empty() ? lab : label_to_cell[size_t(lab)];

      if (nb >= 0) {
        if (nb <= ci) continue; // built from the lower-id side
        Edge e;
        e.edge_id = int(part.edges.size());
        e.a = a;
        e.b = b;
        e.kind = EdgeKind::Internal;
        e.left_cell = ci;
        e.right_cell = nb;
        e.length = len;
        Vec2 nrm = segment_right_normal(a, b);
        if (nrm.dot(part.point(nb) - part.point(ci)) < 0) nrm = -nrm;
        e.normal = nrm;
        e.h_e = (part.point(nb) - part.point(ci)).norm();
        part.cell_edges[size_t(ci)].push_back(e.edge_id);
        part.cell_edges[size_t(nb)].push_back(e.edge_id);
        part.neighbors[size_t(ci)].push_back(nb);
        part.neighbors[size_t(nb)].push_back(ci);
        part.edges.push_back(e);
      } else {
        Edge e;
        e.edge_id = int(part.edges.size());
        e.a = a;
        e.b = b;
        e.kind = EdgeKind::External;
        e.left_cell = ci;
        e.right_cell = -1;
        e.length = len;
        Vec2 nrm = segment_right_normal(a, b);
        if (nrm.dot(part.point(ci) - 0.5 * (a + b)) > 0) nrm = -nrm;
        e.normal = nrm;
        e.h_e = point_segment_distance(part.point(ci), a, b);
        if (lab < 0) {
          e.boundary_id = -lab - 1;
        } else {
          // neighbor cell vanished in clipping: attach to the closest outline segment
          const Vec2 mid = 0.5 * (a + b);
          double best = std::numeric_limits<double>::max();
          for (size_t s = 0; s < outline.size(); ++s) {
            const double d =
                point_segment_distance(mid, outline[s], outline[(s + 1) % outline.size()]);
            if (d < best) {
              best = d;
              e.boundary_id = int(s);
            }
          }
        }
        part.cell_edges[size_t(ci)].push_back(e.edge_id);
        part.edges.push_back(e);
      }
    }
  }
  for (auto& nb : part.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

void check_tiling(const PartitionedDomain& part, const Polygon& outline) {
  double sum = 0;
  for (const auto& c : part.cells) sum += c.area;
  const double target = polygon_area(outline);
  if (std::abs(sum - target) > 1e-10 * std::abs(target))
    throw Error("partition does not tile the outline (area mismatch)");
}

} // namespace

PointCloud generate_grid_points(int nx, int ny, const Rect& outline) {
  if (nx < 2 || ny < 2) throw Error("invalid grid: nx and ny must be at least 2");
  if (!(outline.x1 > outline.x0) || !(outline.y1 > outline.y0))
    throw Error("degenerate rectangle");
  PointCloud pc;
  pc.domain_outline = outline.outline();
  const double dx = (outline.x1 - outline.x0) / nx;
  const double dy = (outline.y1 - outline.y0) / ny;
  pc.coords.reserve(size_t(nx) * size_t(ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      pc.coords.emplace_back(outline.x0 + (i + 0.5) * dx, outline.y0 + (j + 0.5) * dy);
  return pc;
}

PartitionedDomain partition_voronoi(const PointCloud& points) {
  const auto& pts = points.coords;
  const auto& outline = points.domain_outline;
  if (pts.size() < 3) throw Error("too few points: Voronoi partition needs at least 3");
  const double scale = outline_diameter(outline);
  require_convex_outline(outline, scale);
  const double eps = 1e-12 * scale;

  // collinearity check
  {
    bool noncollinear = false;
    const Vec2 d0 = pts[1] - pts[0];
    for (size_t i = 2; i < pts.size() && !noncollinear; ++i) {
      const Vec2 d = pts[i] - pts[0];
      if (std::abs(d0.x() * d.y() - d0.y() * d.x()) > eps * scale) noncollinear = true;
    }
    if (!noncollinear) throw Error("degenerate input: points are collinear");
  }
  for (const auto& p : pts)
    if (!point_in_polygon(p, outline)) throw Error("point outside the domain outline");

  BucketGrid grid(pts, outline);
  const int n = int(pts.size());

  std::vector<LPoly> polys(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    LPoly poly = label_outline(outline);
    const Vec2& pi = pts[size_t(i)];
    std::set<int> applied;
    double radius = 3.0 * grid.cell;
    const double rmax = 2.0 * scale + grid.cell;
    while (true) {
      // near candidates first so the security radius shrinks quickly
      for (int j : grid.within(pi, radius, pts)) {
        if (j == i || applied.count(j)) continue;
        const Vec2 diff = pts[size_t(j)] - pi;
        const double d = diff.norm();
        if (d <= eps) throw Error("coincident points in the cloud");
        if (d > 2.0 * max_vertex_dist(poly, pi)) break;
        poly = clip_halfplane(poly, 0.5 * (pi + pts[size_t(j)]), diff / d, j, eps);
        if (poly.size() < 3) throw Error("empty Voronoi cell (point on the outline?)");
        applied.insert(j);
      }
      if (2.0 * max_vertex_dist(poly, pi) <= radius || radius > rmax) break;
      radius *= 2.0;
    }
    if (poly.size() < 3) throw Error("empty Voronoi cell (point on the outline?)");
    polys[size_t(i)] = poly;
  }

  PartitionedDomain part;
  part.cloud = points;
  part.cells.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    Subdomain sd;
    sd.cell_id = i;
    sd.point_id = i;
    sd.polygon.reserve(polys[size_t(i)].size());
    for (const auto& v : polys[size_t(i)]) sd.polygon.push_back(v.p);
    sd.area = polygon_area(sd.polygon);
    if (sd.area <= 0) throw Error("non-positive Voronoi cell area");
    part.cells.push_back(std::move(sd));
  }
  build_edges(part, polys, {}, outline, eps);
  check_tiling(part, outline);
  return part;
}

PartitionedDomain partition_quadrilateral(int nx, int ny, const Polygon& outline) {
  if (nx < 1 || ny < 1) throw Error("invalid grid: nx and ny must be at least 1");
  const double scale = outline_diameter(outline);
  require_convex_outline(outline, scale);
  const double eps = 1e-12 * scale;

  double xmin = outline[0].x(), xmax = xmin, ymin = outline[0].y(), ymax = ymin;
  for (const auto& v : outline) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const double dx = (xmax - xmin) / nx;
  const double dy = (ymax - ymin) / ny;
  if (dx <= 0 || dy <= 0) throw Error("degenerate rectangle");

  const int nlat = nx * ny;
  std::vector<int> label_to_cell(static_cast<size_t>(nlat), -1);
  std::vector<LPoly> kept;
  PartitionedDomain part;
  part.cloud.domain_outline = outline;

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x0 = xmin + i * dx, x1 = xmin + (i + 1) * dx;
      const double y0 = ymin + j * dy, y1 = ymin + (j + 1) * dy;
      // labels: edge starting at each vertex faces a lattice neighbor
      const int below = j > 0 ? (j - 1) * nx + i : -1;
      const int right = i < nx - 1 ? j * nx + i + 1 : -1;
      const int above = j < ny - 1 ? (j + 1) * nx + i : -1;
      const int left = i > 0 ? j * nx + i - 1 : -1;
      const int nolab = nlat; // placeholder resolved to "external" later
      LPoly poly = {{Vec2(x0, y0), below < 0 ? nolab : below},
                    {Vec2(x1, y0), right < 0 ? nolab : right},
                    {Vec2(x1, y1), above < 0 ? nolab : above},
                    {Vec2(x0, y1), left < 0 ? nolab : left}};
      // clip against every outline edge half-plane (outline is convex CCW)
      for (size_t s = 0; s < outline.size() && poly.size() >= 3; ++s) {
        const Vec2& a = outline[s];
        const Vec2& b = outline[(s + 1) % outline.size()];
        poly = clip_halfplane(poly, a, segment_right_normal(a, b), -int(s) - 1, eps);
      }
      if (poly.size() < 3) continue;
      const int lat = j * nx + i;
      double area = 0;
      {
        Polygon pp;
        for (const auto& v : poly) pp.push_back(v.p);
        area = polygon_area(pp);
      }
      if (area <= eps * eps) continue;
      label_to_cell[size_t(lat)] = int(kept.size());
      kept.push_back(poly);
    }

  if (kept.empty()) throw Error("outline does not intersect the lattice");

  label_to_cell.push_back(-1); // nolab placeholder
  for (size_t c = 0; c < kept.size(); ++c) {
    Subdomain sd;
    sd.cell_id = int(c);
    sd.point_id = int(c);
    for (const auto& v : kept[c]) sd.polygon.push_back(v.p);
    sd.area = polygon_area(sd.polygon);
    part.cloud.coords.push_back(polygon_centroid(sd.polygon));
    part.cells.push_back(std::move(sd));
  }
  build_edges(part, kept, label_to_cell, outline, eps);
  check_tiling(part, outline);
  return part;
}

PartitionedDomain partition_quadrilateral(int nx, int ny, const Rect& outline) {
  return partition_quadrilateral(nx, ny, outline.outline());
}

PartitionedDomain partition_mapped_grid(int nx, int ny, const std::vector<Vec2>& corners,
                                        const Polygon& outline) {
  if (nx < 1 || ny < 1) throw Error("invalid grid");
  if (corners.size() != size_t(nx + 1) * size_t(ny + 1))
    throw Error("corner lattice size mismatch");
  const double scale = outline_diameter(outline);
  const double eps = 1e-12 * scale;

  auto vid = [&](int i, int j) { return size_t(j) * size_t(nx + 1) + size_t(i); };

  PartitionedDomain part;
  part.cloud.domain_outline = outline;
  std::vector<LPoly> polys;
  polys.reserve(size_t(nx) * size_t(ny));
  // external side labels: bottom 0, right 1, top 2, left 3 (as -(side+1))
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int below = j > 0 ? (j - 1) * nx + i : -1;
      const int right = i < nx - 1 ? j * nx + i + 1 : -2;
      const int above = j < ny - 1 ? (j + 1) * nx + i : -3;
      const int left = i > 0 ? j * nx + i - 1 : -4;
      LPoly poly = {{corners[vid(i, j)], below},
                    {corners[vid(i + 1, j)], right},
                    {corners[vid(i + 1, j + 1)], above},
                    {corners[vid(i, j + 1)], left}};
      Subdomain sd;
      sd.cell_id = int(polys.size());
      sd.point_id = sd.cell_id;
      for (const auto& v : poly) sd.polygon.push_back(v.p);
      sd.area = polygon_area(sd.polygon);
      if (sd.area <= eps * eps) throw Error("degenerate mapped cell");
      part.cloud.coords.push_back(polygon_centroid(sd.polygon));
      part.cells.push_back(std::move(sd));
      polys.push_back(std::move(poly));
    }
  std::vector<int> ident(static_cast<size_t>(nx) * static_cast<size_t>(ny));
  std::iota(ident.begin(), ident.end(), 0);
  build_edges(part, polys, ident, outline, eps);
  return part;
}

std::vector<SupportSet> build_supports(const PartitionedDomain& part) {
  const int n = part.n_points();
  std::vector<SupportSet> supports(static_cast<size_t>(n));
  std::vector<bool> touches_boundary(static_cast<size_t>(n), false);
  for (const auto& e : part.edges)
    if (e.kind == EdgeKind::External) touches_boundary[size_t(e.left_cell)] = true;

  for (int i = 0; i < n; ++i) {
    std::set<int> members;
    std::set<int> ring(part.neighbors[size_t(i)].begin(), part.neighbors[size_t(i)].end());
    members.insert(ring.begin(), ring.end());

    auto expand = [&](const std::set<int>& from) {
      std::set<int> next;
      for (int c : from)
        for (int nb : part.neighbors[size_t(c)])
          if (nb != i && !members.count(nb)) next.insert(nb);
      members.insert(next.begin(), next.end());
      return next;
    };

    ring = expand(ring); // second neighbors
    int rings = 2;
    if (touches_boundary[size_t(i)]) {
      ring = expand(ring); // third neighbors near the boundary
      ++rings;
    }
    while (int(members.size()) < 10 && !ring.empty() && rings < 16) {
      ring = expand(ring);
      ++rings;
    }
    if (int(members.size()) < 10)
      throw Error("insufficient support for point " + std::to_string(i) + ": m = " +
                  std::to_string(members.size()) + " < 10");
    supports[size_t(i)].center = i;
    supports[size_t(i)].members.assign(members.begin(), members.end());
  }
  return supports;
}

double edge_h(const Edge& edge, const PartitionedDomain& part) {
  if (edge.kind == EdgeKind::Internal)
    return (part.point(edge.right_cell) - part.point(edge.left_cell)).norm();
  return point_segment_distance(part.point(edge.left_cell), edge.a, edge.b);
}

} // namespace fpm
