#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "anisodrop/anisotropy.hpp"
#include "anisodrop/types.hpp"

namespace anisodrop {

/// Closed curve sampled uniformly in an abstract periodic parameter
/// t in [0,1). Differential quantities use 4th-order periodic finite
/// differences, so area/perimeter/moment integrals of smooth curves
/// converge at O(h^4).
struct ClosedCurve {
  Points2 pts;
  int size() const { return static_cast<int>(pts.cols()); }
};

Points2 periodic_derivative(const Points2& pts);  // FD4, unit period
Points2 curve_derivative(const ClosedCurve& c);   // dp/dt, FD4 periodic
double curve_area(const ClosedCurve& c);
double curve_perimeter(const ClosedCurve& c, const SurfaceTension& f);
Vec2 curve_barycenter(const ClosedCurve& c);
/// Unit outer normals (CCW curve) from the FD tangent.
Points2 curve_normals(const ClosedCurve& c);

/// Finite union of disjoint simple CCW loops. Most shapes have one loop;
/// slicing and truncation produce several.
struct Polygon2D {
  std::vector<std::vector<Vec2>> loops;
  bool empty() const { return loops.empty(); }
};

/// Normal graph over a Wulff boundary: dE = { x + u(x) nu_K(x) }.
struct StarDomain {
  WulffShape base;
  VecX offsets;  // one per base sample; ||u||_inf < ell_f / 2
  ClosedCurve curve() const;
};

/// Axis-aligned box centered at the origin.
struct Box {
  VecX sides;
  int dim() const { return static_cast<int>(sides.size()); }
};

struct Ball {
  int dim = 2;
  VecX center;
  double radius = 1.0;
};

/// Occupancy grid, n = 2. Supports volume and nonlocal energies only.
struct GridMask {
  double cell = 1.0;
  Vec2 origin = Vec2::Zero();
  int nx = 0, ny = 0;
  std::vector<uint8_t> mask;  // row-major, nx * ny
  bool occupied(int ix, int iy) const { return mask[iy * nx + ix] != 0; }
  Vec2 center(int ix, int iy) const {
    return origin + Vec2((ix + 0.5) * cell, (iy + 0.5) * cell);
  }
};

using Shape = std::variant<Polygon2D, StarDomain, Box, Ball, GridMask>;

/// Validating constructors.
Shape make_polygon(std::vector<std::vector<Vec2>> loops);
Shape make_polygon(std::vector<Vec2> loop);
Shape make_star(WulffShape base, VecX offsets);
Shape make_box(VecX sides);
Shape make_ball(int dim, VecX center, double radius);
Shape make_grid_mask(GridMask g);

int shape_dim(const Shape& E);

double volume(const Shape& E);
double aniso_perimeter(const Shape& E, const SurfaceTension& f);
VecX barycenter(const Shape& E);
/// Dilation about the origin to the target volume.
Shape rescale_to_volume(const Shape& E, double target);
double diameter(const Shape& E);

struct SlicingPlane {
  Vec2 normal;  // unit
  double offset = 0.0;
};

struct SliceResult {
  Shape plus;   // E intersect {x.nu > t}
  Shape minus;  // E intersect {x.nu < t}
  double cut_measure = 0.0;  // H^1(E intersect {x.nu = t})
};

/// Exact polygon splitting by a line; the anisotropic-perimeter slicing
/// identity holds to machine precision on the outputs. Boxes are split
/// through their polygon form (2D only).
SliceResult slice(const Shape& E, const SlicingPlane& P);

/// Symmetric Hausdorff distance between dense boundary samplings.
double hausdorff_boundary_distance(const Shape& E, const Shape& F,
                                   int samples_per_shape = 1024);

struct StarNorms {
  double linf = 0.0;
  double c1_seminorm = 0.0;  // max |du/ds| along base arclength
  double h1 = 0.0;           // sqrt( sum w (u^2 + (du/ds)^2) )
};

StarNorms star_norms(const StarDomain& E);

/// Boundary points (dense, roughly uniform by arclength) for probing.
std::vector<Vec2> sample_boundary(const Shape& E, int n);

/// 2D shapes convert to polygons for the nonlocal quadratures; `segments`
/// controls the fidelity of curved boundaries.
Polygon2D as_polygon(const Shape& E, int segments = 1024);

/// |E symmetric-difference F| for convex polygon pairs via exact clipping.
double symmetric_difference_area(const Shape& E, const Shape& F);

/// Area of intersection with a convex clip polygon (exact).
Polygon2D clip_to_convex(const Polygon2D& P, const std::vector<Vec2>& convex);

double polygon_area(const Polygon2D& P);

/// Even-odd point membership.
bool polygon_contains(const Polygon2D& P, const Vec2& x);
bool shape_contains(const Shape& E, const Vec2& x);  // 2D shapes

std::pair<Vec2, Vec2> bounding_box(const Shape& E);  // 2D shapes

/// Ear-clipping triangulation (per loop); convex loops fan directly.
std::vector<std::array<Vec2, 3>> triangulate(const Polygon2D& P);

/// Occupancy rasterization of a 2D shape (cell centers inside E).
GridMask rasterize(const Shape& E, double cell);

}  // namespace anisodrop
