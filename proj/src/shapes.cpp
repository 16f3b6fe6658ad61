#include "anisodrop/shapes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "anisodrop/quadrature.hpp"

namespace anisodrop {

// ---------------------------------------------------------------------------
// Closed-curve calculus
// ---------------------------------------------------------------------------

Points2 periodic_derivative(const Points2& pts) {
  const int m = static_cast<int>(pts.cols());
  Points2 d(2, m);
  const double inv = m / 12.0;  // 1 / (12 dt), dt = 1/m
  for (int i = 0; i < m; ++i) {
    const auto& p1 = pts.col((i + 1) % m);
    const auto& m1 = pts.col((i + m - 1) % m);
    const auto& p2 = pts.col((i + 2) % m);
    const auto& m2 = pts.col((i + m - 2) % m);
    d.col(i) = (8.0 * (p1 - m1) - (p2 - m2)) * inv;
  }
  return d;
}

Points2 curve_derivative(const ClosedCurve& c) {
  return periodic_derivative(c.pts);
}

double curve_area(const ClosedCurve& c) {
  const Points2 d = curve_derivative(c);
  const int m = c.size();
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += cross2(c.pts.col(i), d.col(i));
  return 0.5 * acc / m;
}

double curve_perimeter(const ClosedCurve& c, const SurfaceTension& f) {
  const Points2 d = curve_derivative(c);
  const int m = c.size();
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += eval_tension(f, rot_cw(d.col(i)));
  return acc / m;
}

Vec2 curve_barycenter(const ClosedCurve& c) {
  const Points2 d = curve_derivative(c);
  const int m = c.size();
  double area = 0.0, mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec2 p = c.pts.col(i), dp = d.col(i);
    area += cross2(p, dp);
    mx += p.x() * p.x() * dp.y();
    my -= p.y() * p.y() * dp.x();
  }
  return Vec2(mx, my) / area;
}

Points2 curve_normals(const ClosedCurve& c) {
  const Points2 d = curve_derivative(c);
  Points2 n(2, c.size());
  for (int i = 0; i < c.size(); ++i) n.col(i) = rot_cw(d.col(i)).normalized();
  return n;
}

ClosedCurve StarDomain::curve() const {
  ClosedCurve c;
  c.pts = base.points;
  for (int i = 0; i < base.sample_count(); ++i)
    c.pts.col(i) += offsets(i) * base.normals.col(i);
  return c;
}

// ---------------------------------------------------------------------------
// Polygon helpers
// ---------------------------------------------------------------------------

namespace {

double loop_area(const std::vector<Vec2>& loop) {
  double a = 0.0;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) a += cross2(loop[i], loop[(i + 1) % n]);
  return 0.5 * a;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                        const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = cross2(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4;
}

void validate_loop(const std::vector<Vec2>& loop) {
  if (loop.size() < 3)
    throw std::invalid_argument("polygon loop needs at least 3 vertices");
  if (loop_area(loop) <= 0.0)
    throw std::invalid_argument("polygon loop must be CCW with positive area");
  const int n = static_cast<int>(loop.size());
  if (n > 400) return;  // dense samplings come from our own generators
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j],
                             loop[(j + 1) % n]))
        throw std::invalid_argument("polygon loop is not simple");
    }
}

double shape_scale(const Polygon2D& P) {
  double s = 0.0;
  for (const auto& loop : P.loops)
    for (const auto& v : loop) s = std::max(s, v.cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

double polygon_area(const Polygon2D& P) {
  double a = 0.0;
  for (const auto& loop : P.loops) a += loop_area(loop);
  return a;
}

bool polygon_contains(const Polygon2D& P, const Vec2& x) {
  bool inside = false;
  for (const auto& loop : P.loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = loop[i];
      const Vec2& b = loop[j];
      if ((a.y() > x.y()) != (b.y() > x.y()) &&
          x.x() < (b.x() - a.x()) * (x.y() - a.y()) / (b.y() - a.y()) + a.x())
        inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

Shape make_polygon(std::vector<std::vector<Vec2>> loops) {
  for (const auto& loop : loops) validate_loop(loop);
  return Polygon2D{std::move(loops)};
}

Shape make_polygon(std::vector<Vec2> loop) {
  std::vector<std::vector<Vec2>> loops;
  loops.push_back(std::move(loop));
  return make_polygon(std::move(loops));
}

Shape make_star(WulffShape base, VecX offsets) {
  if (offsets.size() != base.sample_count())
    throw std::invalid_argument("star domain: one offset per boundary sample");
  const double limit = 0.5 * base.ell;
  if (offsets.cwiseAbs().maxCoeff() >= limit)
    throw std::invalid_argument(
        "star domain: ||u||_inf must stay below ell_f / 2");
  return StarDomain{std::move(base), std::move(offsets)};
}

Shape make_box(VecX sides) {
  if (sides.size() < 1 || sides.minCoeff() <= 0.0)
    throw std::invalid_argument("box: sides must be positive");
  return Box{std::move(sides)};
}

Shape make_ball(int dim, VecX center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ball: radius must be positive");
  if (center.size() != dim)
    throw std::invalid_argument("ball: center dimension mismatch");
  return Ball{dim, std::move(center), radius};
}

Shape make_grid_mask(GridMask g) {
  if (g.nx <= 0 || g.ny <= 0 ||
      g.mask.size() != static_cast<std::size_t>(g.nx) * g.ny)
    throw std::invalid_argument("grid mask: inconsistent dimensions");
  if (std::accumulate(g.mask.begin(), g.mask.end(), 0) == 0)
    throw std::invalid_argument("grid mask: empty occupancy");
  if (g.cell <= 0.0) throw std::invalid_argument("grid mask: cell size > 0");
  return g;
}

int shape_dim(const Shape& E) {
  return std::visit(
      [](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Box>)
          return e.dim();
        else if constexpr (std::is_same_v<T, Ball>)
          return e.dim;
        else
          return 2;
      },
      E);
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

double volume(const Shape& E) {
  return std::visit(
      [](const auto& e) -> double {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          return polygon_area(e);
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          if (e.base.crystalline()) {
            const ClosedCurve c = e.curve();
            Polygon2D poly;
            poly.loops.emplace_back(c.pts.colwise().begin(),
                                    c.pts.colwise().end());
            return polygon_area(poly);
          }
          return curve_area(e.curve());
        } else if constexpr (std::is_same_v<T, Box>) {
          return e.sides.prod();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return unit_ball_volume(e.dim) * std::pow(e.radius, e.dim);
        } else {
          long cnt = 0;
          for (uint8_t b : e.mask) cnt += (b != 0);
          return cnt * e.cell * e.cell;
        }
      },
      E);
}

double aniso_perimeter(const Shape& E, const SurfaceTension& f) {
  return std::visit(
      [&f](const auto& e) -> double {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          double p = 0.0;
          for (const auto& loop : e.loops) {
            const int n = static_cast<int>(loop.size());
            for (int i = 0; i < n; ++i)
              p += eval_tension(f, rot_cw(loop[(i + 1) % n] - loop[i]));
          }
          return p;
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          const ClosedCurve c = e.curve();
          if (e.base.crystalline()) {
            double p = 0.0;
            const int n = c.size();
            for (int i = 0; i < n; ++i)
              p += eval_tension(f,
                                rot_cw(c.pts.col((i + 1) % n) - c.pts.col(i)));
            return p;
          }
          return curve_perimeter(c, f);
        } else if constexpr (std::is_same_v<T, Box>) {
          const int n = e.dim();
          double p = 0.0;
          for (int i = 0; i < n; ++i) {
            VecX nu = VecX::Zero(n);
            nu(i) = 1.0;
            double facet = 1.0;
            for (int j = 0; j < n; ++j)
              if (j != i) facet *= e.sides(j);
            p += (eval_tension(f, nu) + eval_tension(f, VecX(-nu))) * facet;
          }
          return p;
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (e.dim == 2) {
            auto integrand = [&](double th) {
              return eval_tension(f, Vec2(std::cos(th), std::sin(th)));
            };
            return e.radius *
                   adaptive_gauss(integrand, 0.0, 2.0 * M_PI, 1e-12).value;
          }
          if (f.kind() == TensionKind::Euclidean)
            return e.dim * unit_ball_volume(e.dim) *
                   std::pow(e.radius, e.dim - 1);
          throw UnsupportedError(
              "aniso_perimeter: balls in n >= 3 support Euclidean f only");
        } else {
          throw UnsupportedError(
              "aniso_perimeter: grid masks have no convergent anisotropic "
              "perimeter");
        }
      },
      E);
}

VecX barycenter(const Shape& E) {
  return std::visit(
      [](const auto& e) -> VecX {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          double area = 0.0;
          Vec2 m = Vec2::Zero();
          for (const auto& loop : e.loops) {
            const int n = static_cast<int>(loop.size());
            for (int i = 0; i < n; ++i) {
              const Vec2 &a = loop[i], &b = loop[(i + 1) % n];
              const double c = cross2(a, b);
              area += c;
              m += c * (a + b);
            }
          }
          return VecX(Vec2(m / (3.0 * area)));
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          if (e.base.crystalline()) {
            const ClosedCurve c = e.curve();
            Polygon2D poly;
            poly.loops.emplace_back(c.pts.colwise().begin(),
                                    c.pts.colwise().end());
            return barycenter(Shape{poly});
          }
          return VecX(curve_barycenter(e.curve()));
        } else if constexpr (std::is_same_v<T, Box>) {
          return VecX::Zero(e.dim());
        } else if constexpr (std::is_same_v<T, Ball>) {
          return e.center;
        } else {
          Vec2 m = Vec2::Zero();
          long cnt = 0;
          for (int iy = 0; iy < e.ny; ++iy)
            for (int ix = 0; ix < e.nx; ++ix)
              if (e.occupied(ix, iy)) {
                m += e.center(ix, iy);
                ++cnt;
              }
          return VecX(Vec2(m / cnt));
        }
      },
      E);
}

Shape rescale_to_volume(const Shape& E, double target) {
  if (target <= 0.0)
    throw std::invalid_argument("rescale_to_volume: target must be positive");
  const int n = shape_dim(E);
  const double r = std::pow(target / volume(E), 1.0 / n);
  return std::visit(
      [r](const auto& e) -> Shape {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          Polygon2D out = e;
          for (auto& loop : out.loops)
            for (auto& v : loop) v *= r;
          return out;
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          // A dilated star domain is no longer a graph over the same Wulff
          // base; return the scaled sampled curve as a polygon.
          const ClosedCurve c = e.curve();
          Polygon2D out;
          out.loops.emplace_back();
          for (int i = 0; i < c.size(); ++i)
            out.loops.back().push_back(r * Vec2(c.pts.col(i)));
          return out;
        } else if constexpr (std::is_same_v<T, Box>) {
          return Box{VecX(r * e.sides)};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Ball{e.dim, VecX(r * e.center), r * e.radius};
        } else {
          GridMask g = e;
          g.cell *= r;
          g.origin *= r;
          return g;
        }
      },
      E);
}

double diameter(const Shape& E) {
  auto max_pairwise = [](const std::vector<Vec2>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        best = std::max(best, (pts[i] - pts[j]).squaredNorm());
    return std::sqrt(best);
  };
  return std::visit(
      [&](const auto& e) -> double {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          std::vector<Vec2> pts;
          for (const auto& loop : e.loops)
            pts.insert(pts.end(), loop.begin(), loop.end());
          return max_pairwise(pts);
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          const ClosedCurve c = e.curve();
          std::vector<Vec2> pts(c.pts.colwise().begin(), c.pts.colwise().end());
          return max_pairwise(pts);
        } else if constexpr (std::is_same_v<T, Box>) {
          return e.sides.norm();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return 2.0 * e.radius;
        } else {
          std::vector<Vec2> pts;
          for (int iy = 0; iy < e.ny; ++iy)
            for (int ix = 0; ix < e.nx; ++ix)
              if (e.occupied(ix, iy))
                for (int dx = 0; dx <= 1; ++dx)
                  for (int dy = 0; dy <= 1; ++dy)
                    pts.push_back(e.origin +
                                  e.cell * Vec2(ix + dx, iy + dy));
          return max_pairwise(pts);
        }
      },
      E);
}

// ---------------------------------------------------------------------------
// Slicing
// ---------------------------------------------------------------------------

namespace {

struct SliceNode {
  Vec2 pt;
  double s = 0.0;
  int crossing = -1;  // global crossing index, -1 if none
};

struct Crossing {
  Vec2 pt;
  double tau = 0.0;
  bool plus_start = false;  // the arc after this crossing lies on the + side
  int arc_after = -1;       // filled per side during assembly
};

}  // namespace

SliceResult slice(const Shape& E, const SlicingPlane& P) {
  const Vec2 nu = P.normal.normalized();
  const double t = P.offset;
  const Vec2 tau = rot_ccw(nu);

  const Polygon2D* poly = std::get_if<Polygon2D>(&E);
  Polygon2D from_box;
  if (!poly) {
    const Box* box = std::get_if<Box>(&E);
    if (!box || box->dim() != 2)
      throw UnsupportedError("slice: polygon or 2D box input required");
    from_box = as_polygon(E);
    poly = &from_box;
  }

  double s_scale = std::abs(t);
  for (const auto& loop : poly->loops)
    for (const auto& v : loop) s_scale = std::max(s_scale, v.norm());
  const double eps = 1e-12 * (s_scale + 1e-300);

  Polygon2D plus, minus;
  std::vector<Crossing> crossings;
  // Arcs per side: sequences of points starting and ending at crossings.
  struct Arc {
    std::vector<Vec2> pts;
    int start_crossing = -1, end_crossing = -1;
  };
  std::vector<Arc> plus_arcs, minus_arcs;

  for (const auto& loop : poly->loops) {
    const int n = static_cast<int>(loop.size());
    std::vector<double> s(n);
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i) {
      s[i] = loop[i].dot(nu) - t;
      if (std::abs(s[i]) <= eps) s[i] = 0.0;
      has_pos |= s[i] > 0.0;
      has_neg |= s[i] < 0.0;
    }
    if (!has_pos && !has_neg) continue;  // measure-zero sliver on the line
    if (!has_neg) {
      plus.loops.push_back(loop);
      continue;
    }
    if (!has_pos) {
      minus.loops.push_back(loop);
      continue;
    }

    // Augment with crossing points on sign-change edges.
    std::vector<SliceNode> nodes;
    nodes.reserve(n + 8);
    for (int i = 0; i < n; ++i) {
      nodes.push_back({loop[i], s[i], -1});
      const int j = (i + 1) % n;
      if (s[i] * s[j] < 0.0) {
        const double w = s[i] / (s[i] - s[j]);
        nodes.push_back({loop[i] + w * (loop[j] - loop[i]), 0.0, -1});
      }
    }
    const int m = static_cast<int>(nodes.size());

    // Classify zero nodes: a crossing where the neighboring nonzero signs
    // differ, a touch otherwise.
    auto next_sign = [&](int i) {
      for (int k = 1; k < m; ++k) {
        const double v = nodes[(i + k) % m].s;
        if (v != 0.0) return v > 0 ? 1 : -1;
      }
      return 0;
    };
    auto prev_sign = [&](int i) {
      for (int k = 1; k < m; ++k) {
        const double v = nodes[(i - k + m) % m].s;
        if (v != 0.0) return v > 0 ? 1 : -1;
      }
      return 0;
    };
    std::vector<int> loop_crossings;  // node indices in loop order
    for (int i = 0; i < m; ++i) {
      if (nodes[i].s != 0.0) continue;
      // Collinear runs carry the crossing on their last node.
      if (nodes[(i + 1) % m].s == 0.0) continue;
      const int ps = prev_sign(i), ns = next_sign(i);
      if (ps != ns && ps != 0 && ns != 0) {
        nodes[i].crossing = static_cast<int>(crossings.size());
        Crossing c;
        c.pt = nodes[i].pt;
        c.tau = nodes[i].pt.dot(tau);
        c.plus_start = ns > 0;
        crossings.push_back(c);
        loop_crossings.push_back(i);
      }
    }
    if (loop_crossings.size() < 2 || loop_crossings.size() % 2 != 0)
      throw std::runtime_error("slice: degenerate tangency configuration");

    // Cut the augmented loop into arcs between consecutive crossings.
    const int nc = static_cast<int>(loop_crossings.size());
    for (int k = 0; k < nc; ++k) {
      const int a = loop_crossings[k];
      const int b = loop_crossings[(k + 1) % nc];
      Arc arc;
      arc.start_crossing = nodes[a].crossing;
      arc.end_crossing = nodes[b].crossing;
      int side = 0;
      for (int i = a;; i = (i + 1) % m) {
        arc.pts.push_back(nodes[i].pt);
        if (i != a && nodes[i].s != 0.0)
          side = nodes[i].s > 0 ? 1 : -1;
        if (i == b && !arc.pts.empty() && arc.pts.size() > 1) break;
        if (i == b && a == b) break;
      }
      if (side == 0)
        throw std::runtime_error("slice: arc with no interior vertex");
      (side > 0 ? plus_arcs : minus_arcs).push_back(std::move(arc));
    }
  }

  double cut = 0.0;
  if (!crossings.empty()) {
    // Pair crossings along the line; the odd intervals lie inside E.
    std::vector<int> order(crossings.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return crossings[a].tau < crossings[b].tau;
    });
    if (order.size() % 2 != 0)
      throw std::runtime_error("slice: odd crossing count");

    // Arc lookup by starting crossing, per side.
    std::vector<int> plus_from(crossings.size(), -1),
        minus_from(crossings.size(), -1);
    for (std::size_t i = 0; i < plus_arcs.size(); ++i)
      plus_from[plus_arcs[i].start_crossing] = static_cast<int>(i);
    for (std::size_t i = 0; i < minus_arcs.size(); ++i)
      minus_from[minus_arcs[i].start_crossing] = static_cast<int>(i);

    // Bridges: for the + side from the upper end of each inside interval
    // to the lower end, reversed for the - side.
    std::vector<int> plus_bridge(crossings.size(), -1),
        minus_bridge(crossings.size(), -1);
    for (std::size_t k = 0; k + 1 < order.size(); k += 2) {
      const int lo = order[k], hi = order[k + 1];
      // Entering the set along +tau at the lower end of an inside interval.
      if (!crossings[lo].plus_start || crossings[hi].plus_start)
        throw std::runtime_error("slice: tangential crossing pairing");
      cut += crossings[hi].tau - crossings[lo].tau;
      plus_bridge[hi] = lo;
      minus_bridge[lo] = hi;
    }

    auto assemble = [&](std::vector<Arc>& arcs, const std::vector<int>& from,
                        const std::vector<int>& bridge, Polygon2D& out) {
      std::vector<bool> used(arcs.size(), false);
      for (std::size_t seed = 0; seed < arcs.size(); ++seed) {
        if (used[seed]) continue;
        std::vector<Vec2> loop;
        int a = static_cast<int>(seed);
        while (!used[a]) {
          used[a] = true;
          const Arc& arc = arcs[a];
          for (std::size_t i = 0; i + 1 < arc.pts.size(); ++i)
            loop.push_back(arc.pts[i]);
          const int nxt_cross = bridge[arc.end_crossing];
          if (nxt_cross < 0)
            throw std::runtime_error("slice: inconsistent bridge pairing");
          // The bridge target point opens the next arc; if the bridge has
          // zero length the shared point is emitted once.
          const Vec2 end_pt = arc.pts.back();
          if ((end_pt - crossings[nxt_cross].pt).norm() > 0.0)
            loop.push_back(end_pt);
          a = from[nxt_cross];
          if (a < 0) throw std::runtime_error("slice: dangling crossing");
        }
        // Drop degenerate slivers.
        if (loop.size() >= 3 && loop_area(loop) > eps * eps) {
          out.loops.push_back(std::move(loop));
        }
      }
    };
    assemble(plus_arcs, plus_from, plus_bridge, plus);
    assemble(minus_arcs, minus_from, minus_bridge, minus);
  }

  return SliceResult{Shape{std::move(plus)}, Shape{std::move(minus)}, cut};
}

// ---------------------------------------------------------------------------
// Sampling, distances, conversions
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec2> sample_polyline(const std::vector<std::vector<Vec2>>& loops,
                                  int n) {
  double total = 0.0;
  for (const auto& loop : loops) {
    const int m = static_cast<int>(loop.size());
    for (int i = 0; i < m; ++i) total += (loop[(i + 1) % m] - loop[i]).norm();
  }
  std::vector<Vec2> out;
  out.reserve(n);
  for (const auto& loop : loops) {
    const int m = static_cast<int>(loop.size());
    double loop_len = 0.0;
    for (int i = 0; i < m; ++i)
      loop_len += (loop[(i + 1) % m] - loop[i]).norm();
    const int k = std::max(1, static_cast<int>(std::round(n * loop_len / total)));
    const double step = loop_len / k;
    double want = 0.5 * step, walked = 0.0;
    int emitted = 0;
    for (int i = 0; i < m && emitted < k; ++i) {
      const Vec2 a = loop[i], b = loop[(i + 1) % m];
      const double len = (b - a).norm();
      while (emitted < k && want <= walked + len) {
        out.push_back(a + (want - walked) / len * (b - a));
        ++emitted;
        want += step;
      }
      walked += len;
    }
  }
  return out;
}

}  // namespace

std::vector<Vec2> sample_boundary(const Shape& E, int n) {
  return std::visit(
      [n](const auto& e) -> std::vector<Vec2> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Ball>) {
          if (e.dim != 2)
            throw UnsupportedError("sample_boundary: 2D shapes only");
          std::vector<Vec2> out;
          out.reserve(n);
          for (int i = 0; i < n; ++i) {
            const double th = 2.0 * M_PI * (i + 0.5) / n;
            out.push_back(Vec2(e.center(0), e.center(1)) +
                          e.radius * Vec2(std::cos(th), std::sin(th)));
          }
          return out;
        } else if constexpr (std::is_same_v<T, GridMask>) {
          throw UnsupportedError("sample_boundary: grid masks unsupported");
        } else {
          const Polygon2D poly = as_polygon(Shape{e}, std::max(n, 256));
          return sample_polyline(poly.loops, n);
        }
      },
      E);
}

double hausdorff_boundary_distance(const Shape& E, const Shape& F,
                                   int samples_per_shape) {
  const auto a = sample_boundary(E, samples_per_shape);
  const auto b = sample_boundary(F, samples_per_shape);
  auto one_sided = [](const std::vector<Vec2>& from,
                      const std::vector<Vec2>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, (p - q).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

StarNorms star_norms(const StarDomain& E) {
  const VecX& u = E.offsets;
  const VecX& w = E.base.weights;
  const int m = static_cast<int>(u.size());
  StarNorms out;
  out.linf = u.cwiseAbs().maxCoeff();
  double h1sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const int ip = (i + 1) % m, im = (i - 1 + m) % m;
    const double ds = 0.5 * (w(ip) + w(im)) + w(i);  // arclength i-1 -> i+1
    const double du = (u(ip) - u(im)) / ds;
    out.c1_seminorm = std::max(out.c1_seminorm, std::abs(du));
    h1sq += w(i) * (u(i) * u(i) + du * du);
  }
  out.h1 = std::sqrt(h1sq);
  return out;
}

Polygon2D as_polygon(const Shape& E, int segments) {
  return std::visit(
      [segments](const auto& e) -> Polygon2D {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          return e;
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          const ClosedCurve c = e.curve();
          Polygon2D out;
          out.loops.emplace_back(c.pts.colwise().begin(),
                                 c.pts.colwise().end());
          return out;
        } else if constexpr (std::is_same_v<T, Box>) {
          if (e.dim() != 2)
            throw UnsupportedError("as_polygon: 2D boxes only");
          const double hx = 0.5 * e.sides(0), hy = 0.5 * e.sides(1);
          Polygon2D out;
          out.loops.push_back(
              {Vec2(-hx, -hy), Vec2(hx, -hy), Vec2(hx, hy), Vec2(-hx, hy)});
          return out;
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (e.dim != 2) throw UnsupportedError("as_polygon: 2D balls only");
          Polygon2D out;
          out.loops.emplace_back();
          for (int i = 0; i < segments; ++i) {
            const double th = 2.0 * M_PI * i / segments;
            out.loops.back().push_back(
                Vec2(e.center(0), e.center(1)) +
                e.radius * Vec2(std::cos(th), std::sin(th)));
          }
          return out;
        } else {
          throw UnsupportedError("as_polygon: grid masks unsupported");
        }
      },
      E);
}

Polygon2D clip_to_convex(const Polygon2D& P, const std::vector<Vec2>& convex) {
  Shape cur{P};
  const int n = static_cast<int>(convex.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 a = convex[i], b = convex[(i + 1) % n];
    const Vec2 nrm = rot_cw(b - a).normalized();
    if (std::get<Polygon2D>(cur).empty()) break;
    cur = slice(cur, SlicingPlane{nrm, a.dot(nrm)}).minus;
  }
  return std::get<Polygon2D>(cur);
}

double symmetric_difference_area(const Shape& E, const Shape& F) {
  const Polygon2D pe = as_polygon(E);
  const Polygon2D pf = as_polygon(F);
  if (pf.loops.size() != 1)
    throw UnsupportedError("symmetric_difference_area: second shape must be a "
                           "single convex loop");
  const auto& clip = pf.loops.front();
  const int n = static_cast<int>(clip.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 a = clip[i], b = clip[(i + 1) % n], c = clip[(i + 2) % n];
    if (cross2(b - a, c - b) < -1e-12 * shape_scale(pf))
      throw UnsupportedError("symmetric_difference_area: clip polygon must be "
                             "convex");
  }
  const double inter = polygon_area(clip_to_convex(pe, clip));
  return polygon_area(pe) + polygon_area(pf) - 2.0 * inter;
}

bool shape_contains(const Shape& E, const Vec2& x) {
  return std::visit(
      [&x](const auto& e) -> bool {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (e.dim() != 2)
            throw UnsupportedError("shape_contains: 2D shapes only");
          return std::abs(x.x()) < 0.5 * e.sides(0) &&
                 std::abs(x.y()) < 0.5 * e.sides(1);
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (e.dim != 2)
            throw UnsupportedError("shape_contains: 2D shapes only");
          return (x - Vec2(e.center(0), e.center(1))).norm() < e.radius;
        } else if constexpr (std::is_same_v<T, GridMask>) {
          const Vec2 rel = (x - e.origin) / e.cell;
          const int ix = static_cast<int>(std::floor(rel.x()));
          const int iy = static_cast<int>(std::floor(rel.y()));
          return ix >= 0 && iy >= 0 && ix < e.nx && iy < e.ny &&
                 e.occupied(ix, iy);
        } else {
          return polygon_contains(as_polygon(Shape{e}), x);
        }
      },
      E);
}

std::pair<Vec2, Vec2> bounding_box(const Shape& E) {
  return std::visit(
      [](const auto& e) -> std::pair<Vec2, Vec2> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (e.dim() != 2)
            throw UnsupportedError("bounding_box: 2D shapes only");
          const Vec2 h(0.5 * e.sides(0), 0.5 * e.sides(1));
          return {-h, h};
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (e.dim != 2)
            throw UnsupportedError("bounding_box: 2D shapes only");
          const Vec2 c(e.center(0), e.center(1));
          const Vec2 h(e.radius, e.radius);
          return {c - h, c + h};
        } else if constexpr (std::is_same_v<T, GridMask>) {
          return {e.origin, e.origin + e.cell * Vec2(e.nx, e.ny)};
        } else {
          const Polygon2D poly = as_polygon(Shape{e}, 256);
          Vec2 lo(std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity());
          Vec2 hi = -lo;
          for (const auto& loop : poly.loops)
            for (const auto& v : loop) {
              lo = lo.cwiseMin(v);
              hi = hi.cwiseMax(v);
            }
          return {lo, hi};
        }
      },
      E);
}

std::vector<std::array<Vec2, 3>> triangulate(const Polygon2D& P) {
  std::vector<std::array<Vec2, 3>> tris;
  for (const auto& loop : P.loops) {
    const int nl = static_cast<int>(loop.size());
    bool convex = true;
    for (int i = 0; i < nl && convex; ++i)
      convex = cross2(loop[(i + 1) % nl] - loop[i],
                      loop[(i + 2) % nl] - loop[(i + 1) % nl]) >= 0.0;
    if (convex) {
      for (int i = 1; i + 1 < nl; ++i)
        tris.push_back({loop[0], loop[i], loop[i + 1]});
      continue;
    }
    std::vector<Vec2> poly = loop;
    // Ear clipping for the general case.
    while (poly.size() > 3) {
      const int n = static_cast<int>(poly.size());
      int ear = -1;
      for (int i = 0; i < n; ++i) {
        const Vec2 &a = poly[(i - 1 + n) % n], &b = poly[i],
                   &c = poly[(i + 1) % n];
        if (cross2(b - a, c - b) <= 0.0) continue;  // reflex
        bool contains_other = false;
        for (int j = 0; j < n && !contains_other; ++j) {
          if (j == (i - 1 + n) % n || j == i || j == (i + 1) % n) continue;
          const Vec2& p = poly[j];
          const double d1 = cross2(b - a, p - a), d2 = cross2(c - b, p - b),
                       d3 = cross2(a - c, p - c);
          contains_other = d1 > 0 && d2 > 0 && d3 > 0;
        }
        if (!contains_other) {
          ear = i;
          break;
        }
      }
      if (ear < 0) throw std::runtime_error("triangulate: no ear found");
      const int n2 = static_cast<int>(poly.size());
      tris.push_back({poly[(ear - 1 + n2) % n2], poly[ear],
                      poly[(ear + 1) % n2]});
      poly.erase(poly.begin() + ear);
    }
    if (poly.size() == 3) tris.push_back({poly[0], poly[1], poly[2]});
  }
  return tris;
}

GridMask rasterize(const Shape& E, double cell) {
  auto [lo, hi] = bounding_box(E);
  GridMask g;
  g.cell = cell;
  g.origin = lo;
  g.nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / cell - 1e-12));
  g.ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / cell - 1e-12));
  g.nx = std::max(g.nx, 1);
  g.ny = std::max(g.ny, 1);
  g.mask.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (shape_contains(E, g.center(ix, iy))) g.mask[iy * g.nx + ix] = 1;
  return g;
}

}  // namespace anisodrop
