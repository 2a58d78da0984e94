#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpm {

using Vec2 = Eigen::Vector2d;

/// Ordered vertex list, counter-clockwise, implicitly closed.
using Polygon = std::vector<Vec2>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Polygon helpers
// ---------------------------------------------------------------------------

double polygon_area(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);
bool polygon_is_convex(const Polygon& poly, double tol = 0.0);
bool point_in_polygon(const Vec2& p, const Polygon& poly);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  Polygon outline() const;
};

struct PointCloud {
  std::vector<Vec2> coords;
  Polygon domain_outline;
};

struct Subdomain {
  int cell_id = -1;
  Polygon polygon;   // CCW
  int point_id = -1; // the single internal point P0
  double area = 0;
};

enum class EdgeKind { Internal, External };

struct Edge {
  int edge_id = -1;
  Vec2 a, b; // endpoints
  EdgeKind kind = EdgeKind::Internal;
  int left_cell = -1;
  int right_cell = -1; // -1 for external edges
  Vec2 normal;         // unit; internal: outward from left cell, external: outward from domain
  double length = 0;
  double h_e = 0;
  int boundary_id = -1; // outline segment / grid side index, -1 for internal
};

struct SupportSet {
  int center = -1;
  std::vector<int> members; // sorted point ids, center excluded
  int m() const { return static_cast<int>(members.size()); }
};

/// A partitioned domain: one internal point per subdomain, cell/point ids aligned.
struct PartitionedDomain {
  PointCloud cloud;
  std::vector<Subdomain> cells;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> cell_edges; // edge ids incident to each cell
  std::vector<std::vector<int>> neighbors;  // edge-sharing neighbor cells, sorted

  int n_points() const { return static_cast<int>(cloud.coords.size()); }
  const Vec2& point(int id) const { return cloud.coords[size_t(id)]; }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// nx*ny points at the cell centers of a uniform lattice over `outline`.
PointCloud generate_grid_points(int nx, int ny, const Rect& outline);

/// Bounded Voronoi diagram of the cloud, clipped against the (convex) outline.
PartitionedDomain partition_voronoi(const PointCloud& points);

/// Uniform nx*ny lattice over the outline's bounding box, cells clipped against
/// the convex outline; internal point of each cell is the clipped-polygon centroid.
PartitionedDomain partition_quadrilateral(int nx, int ny, const Polygon& outline);
PartitionedDomain partition_quadrilateral(int nx, int ny, const Rect& outline);

/// Structured partition from an (nx+1)x(ny+1) lattice of quad corners
/// (row-major, j*(nx+1)+i). External edges get boundary_id 0..3 for the
/// eta=0, xi=max, eta=max, xi=0 sides. Used for mapped grids on curved or
/// slanted domains where clipping a rectangular lattice would leave slivers.
PartitionedDomain partition_mapped_grid(int nx, int ny,
                                        const std::vector<Vec2>& corners,
                                        const Polygon& outline);

/// Support set per point: edge-sharing neighbors plus their neighbors; cells
/// touching the external boundary take the third ring as well, and rings keep
/// expanding until at least 10 members are found (error when exhausted).
std::vector<SupportSet> build_supports(const PartitionedDomain& part);

/// Edge length scale: distance between the two internal points for internal
/// edges, distance from the cell's internal point to the segment otherwise.
double edge_h(const Edge& edge, const PartitionedDomain& part);

} // namespace fpm
