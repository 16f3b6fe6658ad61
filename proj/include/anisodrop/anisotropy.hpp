#pragma once

#include <utility>
#include <vector>

#include "anisodrop/types.hpp"

namespace anisodrop {

enum class TensionKind { Euclidean, Quadratic, Crystalline, Perturbed2D };

/// A surface tension f: positively one-homogeneous, convex, positive away
/// from the origin. Construction validates those properties per variant;
/// instances are immutable afterwards.
class SurfaceTension {
 public:
  /// Defaults to the Euclidean norm on R^2.
  SurfaceTension() = default;

  /// f(nu) = |nu|.
  static SurfaceTension euclidean(int dim);
  /// f(nu) = |A nu| for symmetric positive definite A.
  static SurfaceTension quadratic(const MatX& A);
  /// f(nu) = max_i x_i . nu; requires 0 in the interior of conv{x_i}.
  /// In dimension >= 3 the point set must be the vertex set of an
  /// axis-aligned box (the only crystalline case exercised beyond 2D).
  static SurfaceTension crystalline(const std::vector<VecX>& points);
  /// f(nu) = |nu| (1 + delta sum_k c_k cos(k theta_nu)), n = 2 only.
  /// Fails if the convexity certificate f + f'' > 0 does not hold on a
  /// 4096-point angular grid.
  static SurfaceTension perturbed2d(
      double delta, const std::vector<std::pair<int, double>>& harmonics);

  TensionKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool smooth() const { return kind_ != TensionKind::Crystalline; }

  const MatX& matrix() const { return A_; }
  const MatX& matrix_inverse() const { return A_inv_; }
  const std::vector<VecX>& points() const { return points_; }
  double delta() const { return delta_; }
  const std::vector<std::pair<int, double>>& harmonics() const {
    return harmonics_;
  }

  /// Angular profile g(theta) = f on the unit circle and its derivatives
  /// (2D smooth variants only).
  double profile(double theta) const;
  double profile_d1(double theta) const;
  double profile_d2(double theta) const;

  /// Convex hull of the crystalline point set in 2D, CCW (equals the Wulff
  /// shape boundary).
  const std::vector<Vec2>& hull() const { return hull_; }

 private:
  TensionKind kind_ = TensionKind::Euclidean;
  int dim_ = 2;
  MatX A_, A_inv_;
  std::vector<VecX> points_;
  double delta_ = 0.0;
  std::vector<std::pair<int, double>> harmonics_;
  std::vector<Vec2> hull_;          // crystalline 2D
  std::vector<Vec2> hull_normals_;  // outer unit normals per hull edge
  std::vector<double> hull_offsets_;  // support values per hull edge
  std::vector<double> box_halves_;    // crystalline nD box half-sides

  friend double eval_dual(const SurfaceTension&, const VecX&);
  friend std::pair<double, double> tension_range(const SurfaceTension&);
};

/// f(nu); total (f(0) = 0 by homogeneous extension).
double eval_tension(const SurfaceTension& f, const VecX& nu);
/// Dual norm f_*(x) = sup { x . nu | f(nu) <= 1 }; the Wulff shape is
/// {f_* < 1}.
double eval_dual(const SurfaceTension& f, const VecX& x);
/// Gradient of f away from 0 (smooth variants only; degree-0 homogeneous).
VecX tension_gradient(const SurfaceTension& f, const VecX& nu);
/// (ell_f, L_f): min and max of f over the unit sphere.
std::pair<double, double> tension_range(const SurfaceTension& f);

inline double eval_tension(const SurfaceTension& f, const Vec2& nu) {
  return eval_tension(f, VecX(nu));
}
inline double eval_dual(const SurfaceTension& f, const Vec2& x) {
  return eval_dual(f, VecX(x));
}

/// Sampled realization of the Wulff shape K = {f_* < 1} with boundary
/// points, exact outer normals and surface (length) weights.
struct WulffShape {
  SurfaceTension tension;
  Points2 points;   // boundary samples x in dK
  Points2 normals;  // outer unit normal at each sample
  VecX weights;     // length weight per sample; sum approximates P(dK)
  double volume = 0.0;
  double ell = 0.0;      // inradius bound: B_ell subset K
  double ell_cap = 0.0;  // circumradius bound: K subset B_L
  std::vector<Vec2> polygon_vertices;  // crystalline 2D only

  int sample_count() const { return static_cast<int>(points.cols()); }
  bool crystalline() const { return !polygon_vertices.empty(); }
};

/// Build the Wulff shape of a 2D surface tension with at least
/// `sample_count` boundary samples. Crystalline tensions yield the exact
/// polygon with per-edge midpoint nodes; smooth tensions are realized
/// through the support parameterization x(theta) = grad f(nu(theta)) with
/// analytic tangent vectors, so area and perimeter weights converge
/// spectrally.
WulffShape build_wulff(const SurfaceTension& f, int sample_count);

/// Anisotropic perimeter of the sampled Wulff boundary, sum w_i f(nu_i)
/// (equals n |K| for Wulff shapes).
double wulff_perimeter(const WulffShape& K);

/// CCW convex hull (monotone chain, 1e-12 orientation tolerance).
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts);

}  // namespace anisodrop
