#include "anisodrop/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>

#include "anisodrop/parallel.hpp"
#include "anisodrop/quadrature.hpp"

namespace anisodrop {

int worker_count() {
  if (const char* env = std::getenv("ANISODROP_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

EnergyParams EnergyParams::from_mass(int n, double alpha, double mass) {
  if (alpha <= 0.0 || alpha >= n)
    throw std::invalid_argument("EnergyParams: alpha must lie in (0, n)");
  if (mass <= 0.0) throw std::invalid_argument("EnergyParams: mass > 0");
  EnergyParams p;
  p.n = n;
  p.alpha = alpha;
  p.mass = mass;
  p.epsilon = std::pow(mass, (n + 1.0 - alpha) / n);
  p.mass_given = true;
  return p;
}

EnergyParams EnergyParams::from_epsilon(int n, double alpha, double epsilon) {
  if (alpha <= 0.0 || alpha >= n)
    throw std::invalid_argument("EnergyParams: alpha must lie in (0, n)");
  if (epsilon <= 0.0) throw std::invalid_argument("EnergyParams: epsilon > 0");
  EnergyParams p;
  p.n = n;
  p.alpha = alpha;
  p.epsilon = epsilon;
  p.mass = std::pow(epsilon, n / (n + 1.0 - alpha));
  p.mass_given = false;
  return p;
}

double riesz_lipschitz_constant(int n, double alpha) {
  return 2.0 * n * std::pow(unit_ball_volume(n), alpha / n) / (n - alpha);
}

// ---------------------------------------------------------------------------
// Radial fan over polygons
// ---------------------------------------------------------------------------

namespace {

// Dense gauge table: f_* on the unit circle, linearly interpolated. Only the
// perturbed tension lacks a closed-form dual; sampling it once keeps kernel
// evaluations cheap.
struct GaugeTable {
  std::vector<double> vals;
  double at(double angle) const {
    const int n = static_cast<int>(vals.size());
    double t = angle / (2.0 * M_PI) * n;
    t -= std::floor(t / n) * n;
    const int i = static_cast<int>(t) % n;
    const double fr = t - std::floor(t);
    return vals[i] * (1.0 - fr) + vals[(i + 1) % n] * fr;
  }
};

std::shared_ptr<GaugeTable> make_gauge_table(const SurfaceTension& f) {
  auto tab = std::make_shared<GaugeTable>();
  const int n = 8192;
  tab->vals.resize(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * i / n;
    tab->vals[i] = eval_dual(f, Vec2(std::cos(th), std::sin(th)));
  }
  return tab;
}

struct FanEval {
  const FanKernel& k;
  std::shared_ptr<GaugeTable> table;

  double gauge(double angle, const Vec2& u) const {
    if (!k.dual_of) return 1.0;
    if (table) return table->at(k.negate_dir ? angle + M_PI : angle);
    const Vec2 v = k.negate_dir ? Vec2(-u) : u;
    return eval_dual(*k.dual_of, v);
  }

  double radial(double R, double angle, const Vec2& u) const {
    if (k.log_kernel) {
      const double c = gauge(angle, u);
      return 0.5 * R * R * std::log(c * R) - 0.25 * R * R;
    }
    const double p = 2.0 - k.q;
    double w = 1.0;
    if (k.dual_of) w = std::pow(gauge(angle, u), k.dual_exponent);
    return w * std::pow(R, p) / p;
  }
};

struct Wedge {
  Vec2 u_hat;   // unit direction of the foot of the perpendicular
  Vec2 e_hat;   // unit direction along the edge
  double d = 0.0;      // distance from x to the edge line
  double psi1 = 0.0, psi2 = 0.0;
  double sign = 1.0;
};

bool make_wedge(const Vec2& x, const Vec2& va, const Vec2& vb, Wedge& w) {
  const Vec2 a = va - x, b = vb - x;
  const double cross = cross2(a, b);
  const double scale = std::max(a.norm(), b.norm());
  if (std::abs(cross) <= 1e-14 * scale * scale + 1e-300) return false;
  const Vec2 e = b - a;
  const double elen = e.norm();
  w.e_hat = e / elen;
  w.d = std::abs(cross) / elen;
  const Vec2 foot = a - a.dot(w.e_hat) * w.e_hat;
  w.u_hat = foot / w.d;
  w.psi1 = std::atan(a.dot(w.e_hat) / w.d);
  w.psi2 = std::atan(b.dot(w.e_hat) / w.d);
  w.sign = cross > 0 ? 1.0 : -1.0;
  return true;
}

}  // namespace

EnergyValue fan_integral(const Polygon2D& E, const Vec2& x,
                         const FanKernel& kernel, const QuadratureSpec& spec) {
  if (kernel.q >= 2.0)
    throw std::invalid_argument("fan_integral: radial exponent must be < 2");
  FanEval fe{kernel, nullptr};
  if (kernel.dual_of && kernel.dual_of->kind() == TensionKind::Perturbed2D)
    fe.table = make_gauge_table(*kernel.dual_of);

  std::vector<Wedge> wedges;
  for (const auto& loop : E.loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
      Wedge w;
      if (make_wedge(x, loop[i], loop[(i + 1) % n], w)) wedges.push_back(w);
    }
  }
  if (wedges.empty()) return {0.0, 0.0};

  auto wedge_fn = [&fe](const Wedge& w) {
    return [&fe, &w](double psi) {
      const double R = w.d / std::cos(psi);
      const Vec2 u = std::cos(psi) * w.u_hat + std::sin(psi) * w.e_hat;
      const double angle = std::atan2(u.y(), u.x());
      return fe.radial(R, angle, u);
    };
  };

  // Coarse pass fixes the absolute floor of the adaptive refinement so that
  // decisions stay scale covariant.
  double abs_total = 0.0;
  for (const auto& w : wedges)
    abs_total += std::abs(fixed_gauss(wedge_fn(w), w.psi1, w.psi2, 6));
  const double floor_abs =
      spec.rel_tol * abs_total / (4.0 * static_cast<double>(wedges.size()));

  EnergyValue out;
  for (const auto& w : wedges) {
    if (spec.adaptive_fan) {
      const QuadResult r =
          adaptive_gauss(wedge_fn(w), w.psi1, w.psi2, spec.rel_tol, floor_abs);
      out.value += w.sign * r.value;
      out.error += r.error;
    } else {
      const double v = fixed_gauss(wedge_fn(w), w.psi1, w.psi2,
                                   spec.angular_order);
      const double c = fixed_gauss(wedge_fn(w), w.psi1, w.psi2,
                                   std::max(4, spec.angular_order / 2));
      out.value += w.sign * v;
      out.error += std::abs(v - c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boxes: correlation integral with a Duffy split
// ---------------------------------------------------------------------------

namespace {

double duffy_value(const VecX& s, double alpha, int order) {
  const int n = static_cast<int>(s.size());
  const GaussRule& g = gauss_legendre(order);
  const int m = static_cast<int>(g.nodes.size());
  // sigma nodes on [0,1]
  std::vector<double> node(m), wt(m);
  for (int i = 0; i < m; ++i) {
    node[i] = 0.5 * (g.nodes[i] + 1.0);
    wt[i] = 0.5 * g.weights[i];
  }
  const int dims = n - 1;
  long combos = 1;
  for (int d = 0; d < dims; ++d) combos *= m;

  double total = 0.0;
  std::vector<int> idx(dims, 0);
  std::vector<double> sigma(dims), poly(n + 1), tmp(n + 1);
  for (int j = 0; j < n; ++j) {
    for (long c = 0; c < combos; ++c) {
      long rem = c;
      double w = 1.0;
      for (int d = 0; d < dims; ++d) {
        idx[d] = static_cast<int>(rem % m);
        rem /= m;
        sigma[d] = node[idx[d]];
        w *= wt[idx[d]];
      }
      double A = s(j) * s(j);
      {
        int d = 0;
        for (int i = 0; i < n; ++i) {
          if (i == j) continue;
          A += s(i) * s(i) * sigma[d] * sigma[d];
          ++d;
        }
      }
      // (1 - rho) prod_{i != j} (1 - rho sigma_i) as a polynomial in rho.
      std::fill(poly.begin(), poly.end(), 0.0);
      poly[0] = 1.0;
      int deg = 0;
      auto mul_factor = [&](double t) {
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (int k = 0; k <= deg; ++k) {
          tmp[k] += poly[k];
          tmp[k + 1] -= poly[k] * t;
        }
        ++deg;
        std::swap(poly, tmp);
      };
      mul_factor(1.0);
      for (int d = 0; d < dims; ++d) mul_factor(sigma[d]);
      double q = 0.0;
      for (int k = 0; k <= deg; ++k) q += poly[k] / (n - alpha + k);
      total += w * std::pow(A, -0.5 * alpha) * q;
    }
  }
  double prod = s.prod();
  return std::pow(2.0, n) * prod * prod * total;
}

}  // namespace

EnergyValue box_interaction(const VecX& sides, double alpha, int order) {
  const int n = static_cast<int>(sides.size());
  if (alpha >= n)
    throw std::invalid_argument("box_interaction: alpha must be < n");
  const double coarse = duffy_value(sides, alpha, order);
  const double fine = duffy_value(sides, alpha, 2 * order);
  return {fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Ball potentials
// ---------------------------------------------------------------------------

namespace {

double disk_potential(const Ball& B, const Vec2& x, double alpha,
                      const QuadratureSpec& spec) {
  const Vec2 c(B.center(0), B.center(1));
  const Vec2 d = x - c;
  const double rho = d.norm(), R = B.radius;
  const double p = 2.0 - alpha;
  if (rho <= R * (1.0 + 1e-14)) {
    auto fn = [&](double th) {
      const Vec2 u(std::cos(th), std::sin(th));
      const double ud = u.dot(d);
      const double disc = std::max(0.0, ud * ud + R * R - rho * rho);
      const double b = -ud + std::sqrt(disc);
      return std::pow(b, p) / p;
    };
    return adaptive_gauss(fn, 0.0, 2.0 * M_PI, spec.rel_tol,
                          spec.rel_tol * std::pow(R, p))
        .value;
  }
  // Exterior point: rays hit the disk inside an angular window.
  const double half = std::asin(std::min(1.0, R / rho));
  const double base = std::atan2(-d.y(), -d.x());
  auto fn = [&](double th) {
    const Vec2 u(std::cos(th), std::sin(th));
    const double ud = u.dot(d);
    const double disc = ud * ud + R * R - rho * rho;
    if (disc <= 0.0) return 0.0;
    const double root = std::sqrt(disc);
    const double t1 = -ud - root, t2 = -ud + root;
    if (t2 <= 0.0) return 0.0;
    return (std::pow(t2, p) - std::pow(std::max(t1, 0.0), p)) / p;
  };
  return adaptive_gauss(fn, base - half, base + half, spec.rel_tol,
                        spec.rel_tol * std::pow(R, p))
      .value;
}

double ball3_potential(const Ball& B, const VecX& x, double alpha,
                       const QuadratureSpec& spec) {
  const double R = B.radius;
  const double rho = (x - B.center).norm();
  if (rho < 1e-14 * R) {
    return 3.0 * unit_ball_volume(3) / (3.0 - alpha) * std::pow(R, 3.0 - alpha);
  }
  auto area = [&](double s) {
    if (s <= R - rho) return 4.0 * M_PI * s * s;
    const double cosphi = (rho * rho + s * s - R * R) / (2.0 * rho * s);
    if (cosphi >= 1.0) return 0.0;
    return 2.0 * M_PI * s * s * (1.0 - cosphi);
  };
  auto fn = [&](double s) { return std::pow(s, -alpha) * area(s); };
  const double lo = std::max(0.0, rho - R), hi = rho + R;
  double val = 0.0;
  if (rho < R) {
    // Split at the kink where spheres start leaving the ball.
    val += adaptive_gauss(fn, 0.0, R - rho, spec.rel_tol).value;
    val += adaptive_gauss(fn, R - rho, hi, spec.rel_tol).value;
  } else {
    val = adaptive_gauss(fn, lo, hi, spec.rel_tol).value;
  }
  return val;
}

// Corner integral int_{[0,a]^n} |z|^(-alpha) dz by the pyramid split (the
// rho integral is exact).
double corner_integral(const VecX& a, double alpha, int order) {
  const int n = static_cast<int>(a.size());
  const GaussRule& g = gauss_legendre(order);
  const int m = static_cast<int>(g.nodes.size());
  std::vector<double> node(m), wt(m);
  for (int i = 0; i < m; ++i) {
    node[i] = 0.5 * (g.nodes[i] + 1.0);
    wt[i] = 0.5 * g.weights[i];
  }
  const int dims = n - 1;
  long combos = 1;
  for (int d = 0; d < dims; ++d) combos *= m;
  double total = 0.0;
  std::vector<int> idx(dims);
  for (int j = 0; j < n; ++j) {
    for (long c = 0; c < combos; ++c) {
      long rem = c;
      double w = 1.0, A = a(j) * a(j);
      int d = 0;
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        const int id = static_cast<int>(rem % m);
        rem /= m;
        w *= wt[id];
        A += a(i) * a(i) * node[id] * node[id];
        ++d;
      }
      total += w * std::pow(A, -0.5 * alpha);
    }
  }
  return a.prod() / (n - alpha) * total;
}

double box_potential(const Box& B, const VecX& x, double alpha, int order) {
  const int n = B.dim();
  if (n > 4)
    throw UnsupportedError("riesz_potential: boxes supported up to n = 4");
  // Signed tensor inclusion-exclusion over the corners.
  double total = 0.0;
  const int corners = 1 << n;
  VecX a(n);
  for (int c = 0; c < corners; ++c) {
    double sgn = 1.0;
    bool degenerate = false;
    for (int i = 0; i < n; ++i) {
      const double edge = (c >> i) & 1 ? 0.5 * B.sides(i) : -0.5 * B.sides(i);
      const double ci = edge - x(i);
      if ((c >> i) & 1)
        sgn *= ci >= 0 ? 1.0 : -1.0;
      else
        sgn *= ci >= 0 ? -1.0 : 1.0;
      a(i) = std::abs(ci);
      degenerate |= a(i) == 0.0;
    }
    if (degenerate) continue;
    total += sgn * corner_integral(a, alpha, order);
  }
  return total;
}

double grid_potential(const GridMask& G, const Vec2& x, double alpha,
                      const QuadratureSpec& spec) {
  const double h = G.cell;
  double v = 0.0;
  QuadratureSpec near_spec = spec;
  near_spec.rel_tol = std::min(spec.rel_tol, 1e-9);
  for (int iy = 0; iy < G.ny; ++iy)
    for (int ix = 0; ix < G.nx; ++ix) {
      if (!G.occupied(ix, iy)) continue;
      const Vec2 c = G.center(ix, iy);
      const double dist = (x - c).lpNorm<Eigen::Infinity>();
      if (dist > 2.5 * h) {
        v += h * h * std::pow((x - c).norm(), -alpha);
      } else {
        // Exact mini-fan on the cell rectangle, valid for x inside or out.
        Polygon2D cell;
        const Vec2 lo = c - Vec2(0.5 * h, 0.5 * h);
        cell.loops.push_back({lo, lo + Vec2(h, 0), lo + Vec2(h, h),
                              lo + Vec2(0, h)});
        FanKernel k;
        k.q = alpha;
        v += fan_integral(cell, x, k, near_spec).value;
      }
    }
  return v;
}

void check_ball_bound(double v, double vol, int n, double alpha) {
  const double omega = unit_ball_volume(n);
  const double r = std::pow(vol / omega, 1.0 / n);
  const double bound = n * omega / (n - alpha) * std::pow(r, n - alpha);
  if (v > bound * (1.0 + 1e-6))
    throw std::logic_error("riesz_potential: ball bound violated");
}

}  // namespace

double riesz_potential(const Shape& E, const VecX& x, double alpha,
                       const QuadratureSpec& spec) {
  const int n = shape_dim(E);
  if (alpha <= 0.0 || alpha >= n)
    throw std::invalid_argument("riesz_potential: alpha must lie in (0, n)");
  double v = 0.0;
  if (const Ball* b = std::get_if<Ball>(&E)) {
    if (n == 2)
      v = disk_potential(*b, Vec2(x(0), x(1)), alpha, spec);
    else if (n == 3)
      v = ball3_potential(*b, x, alpha, spec);
    else if ((x - b->center).norm() < 1e-14 * b->radius)
      v = n * unit_ball_volume(n) / (n - alpha) *
          std::pow(b->radius, n - alpha);
    else
      throw UnsupportedError("riesz_potential: n >= 4 balls at center only");
  } else if (const Box* bx = std::get_if<Box>(&E); bx && bx->dim() > 2) {
    v = box_potential(*bx, x, alpha, spec.outer_order * 2);
  } else if (const GridMask* g = std::get_if<GridMask>(&E)) {
    v = grid_potential(*g, Vec2(x(0), x(1)), alpha, spec);
  } else {
    FanKernel k;
    k.q = alpha;
    v = fan_integral(as_polygon(E), Vec2(x(0), x(1)), k, spec).value;
  }
  check_ball_bound(v, volume(E), n, alpha);
  return v;
}

// ---------------------------------------------------------------------------
// Interaction energies
// ---------------------------------------------------------------------------

namespace {

double polygon_interaction_order(const Polygon2D& P, const FanKernel& kernel,
                                 const QuadratureSpec& spec, int order) {
  const auto tris = triangulate(P);
  const GaussRule& g = gauss_legendre(order);
  const int m = static_cast<int>(g.nodes.size());
  struct Node {
    Vec2 x;
    double w;
  };
  std::vector<Node> nodes;
  nodes.reserve(tris.size() * m * m);
  for (const auto& t : tris) {
    const Vec2 A = t[0], B = t[1], C = t[2];
    const double two_area = cross2(B - A, C - A);
    for (int i = 0; i < m; ++i) {
      const double xi = 0.5 * (g.nodes[i] + 1.0);
      const double wi = 0.5 * g.weights[i];
      for (int j = 0; j < m; ++j) {
        const double eta = 0.5 * (g.nodes[j] + 1.0);
        const double wj = 0.5 * g.weights[j];
        Node nd;
        nd.x = (1.0 - xi) * A + xi * ((1.0 - eta) * B + eta * C);
        nd.w = wi * wj * xi * two_area;
        nodes.push_back(nd);
      }
    }
  }
  std::vector<double> vals(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), [&](int i) {
    vals[i] = fan_integral(P, nodes[i].x, kernel, spec).value;
  });
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += nodes[i].w * vals[i];
  return acc;
}

EnergyValue polygon_interaction(const Polygon2D& P, const FanKernel& kernel,
                                const QuadratureSpec& spec) {
  const double coarse =
      polygon_interaction_order(P, kernel, spec, spec.outer_order);
  const double fine =
      polygon_interaction_order(P, kernel, spec, 2 * spec.outer_order);
  return {fine, std::abs(fine - coarse)};
}

EnergyValue disk_interaction(const Ball& B, double alpha,
                             const QuadratureSpec& spec) {
  auto fn = [&](double rho) {
    Ball centered{2, VecX::Zero(2), B.radius};
    return 2.0 * M_PI * rho *
           disk_potential(centered, Vec2(rho, 0.0), alpha, spec);
  };
  const QuadResult r =
      adaptive_gauss(fn, 0.0, B.radius, std::max(spec.rel_tol, 1e-9));
  return {r.value, r.error};
}

EnergyValue generic_interaction(const Shape& E, const FanKernel& kernel,
                                const QuadratureSpec& spec) {
  return polygon_interaction(as_polygon(E, 512), kernel, spec);
}

}  // namespace

EnergyValue interaction_energy(const Shape& E, double alpha,
                               const QuadratureSpec& spec) {
  const int n = shape_dim(E);
  if (alpha <= 0.0 || alpha >= n)
    throw std::invalid_argument("interaction_energy: alpha in (0, n)");
  if (const Box* b = std::get_if<Box>(&E))
    return box_interaction(b->sides, alpha, 3 * spec.outer_order);
  if (const Ball* b = std::get_if<Ball>(&E)) {
    if (b->dim != 2)
      throw UnsupportedError("interaction_energy: balls in 2D only");
    return disk_interaction(*b, alpha, spec);
  }
  if (const GridMask* g = std::get_if<GridMask>(&E)) {
    double acc = 0.0;
    std::vector<Vec2> centers;
    for (int iy = 0; iy < g->ny; ++iy)
      for (int ix = 0; ix < g->nx; ++ix)
        if (g->occupied(ix, iy)) centers.push_back(g->center(ix, iy));
    std::vector<double> vals(centers.size());
    parallel_for(static_cast<int>(centers.size()), [&](int i) {
      vals[i] = grid_potential(*g, centers[i], alpha, spec);
    });
    for (double v : vals) acc += v;
    return {acc * g->cell * g->cell, 0.0};
  }
  FanKernel k;
  k.q = alpha;
  return polygon_interaction(as_polygon(E), k, spec);
}

double interaction_energy_boundary(const ClosedCurve& c, double alpha) {
  const int m = c.size();
  const Points2 d = curve_derivative(c);
  const double p = 2.0 - alpha;
  const double c2 = p * p;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec2 xi = c.pts.col(i), di = d.col(i);
    for (int j = i + 1; j < m; ++j) {
      const double r = (xi - Vec2(c.pts.col(j))).norm();
      if (r == 0.0) continue;
      const double phi = std::pow(r, p) / c2;
      acc += -2.0 * phi * di.dot(d.col(j));
    }
  }
  return acc / (static_cast<double>(m) * m);
}

EnergyValue interaction_energy_aniso(const Shape& E, const SurfaceTension& f,
                                     double alpha, const QuadratureSpec& spec) {
  if (shape_dim(E) != 2)
    throw UnsupportedError("interaction_energy_aniso: 2D shapes only");
  if (alpha <= 0.0 || alpha >= 2.0)
    throw std::invalid_argument("interaction_energy_aniso: alpha in (0, 2)");
  FanKernel k;
  k.q = alpha;
  k.dual_of = &f;
  k.dual_exponent = -alpha;
  k.negate_dir = true;  // inner variable is y in f_*(x - y)
  return generic_interaction(E, k, spec);
}

// ---------------------------------------------------------------------------
// Dual-norm potentials U_i
// ---------------------------------------------------------------------------

namespace {

struct InnerObjective {
  const Polygon2D& poly;
  FanKernel kernel;
  const QuadratureSpec& spec;
  mutable long evals = 0;
  double operator()(const Vec2& y) const {
    ++evals;
    return fan_integral(poly, y, kernel, spec).value;
  }
};

}  // namespace

DualPotentialResult dual_potential(const Shape& E, const SurfaceTension& f,
                                   DualPotentialKind kind, double exponent,
                                   const QuadratureSpec& spec) {
  if (shape_dim(E) != 2)
    throw UnsupportedError("dual_potential: 2D shapes only");
  const Polygon2D poly = as_polygon(E);

  FanKernel k;
  bool maximize = false;
  bool paper_range = true;
  switch (kind) {
    case DualPotentialKind::U1:
      if (exponent <= 0.0 || exponent >= 2.0)
        throw std::invalid_argument("dual_potential: U1 needs alpha in (0, n)");
      paper_range = exponent < 1.0;
      k.q = exponent;
      k.dual_of = &f;
      k.dual_exponent = -exponent;
      maximize = true;
      break;
    case DualPotentialKind::U2:
      if (exponent <= 0.0)
        throw std::invalid_argument("dual_potential: U2 needs beta > 0");
      k.q = -exponent;
      k.dual_of = &f;
      k.dual_exponent = exponent;
      break;
    case DualPotentialKind::U3:
      k.log_kernel = true;
      k.dual_of = &f;
      break;
  }

  InnerObjective obj{poly, k, spec};
  const double sgn = maximize ? -1.0 : 1.0;  // descend on sgn * objective
  auto cost = [&](const Vec2& y) { return sgn * obj(y); };

  const VecX bc = barycenter(E);
  Vec2 best_y(bc(0), bc(1));
  double best = cost(best_y);
  auto [lo, hi] = bounding_box(E);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const Vec2 y(lo.x() + (i + 0.5) / 5.0 * (hi.x() - lo.x()),
                   lo.y() + (j + 0.5) / 5.0 * (hi.y() - lo.y()));
      const double v = cost(y);
      if (v < best) {
        best = v;
        best_y = y;
      }
    }

  // Coordinate descent with shrinking steps.
  double step = 0.25 * diameter(E);
  const long budget = 20000;
  bool converged = false;
  while (obj.evals < budget) {
    bool improved = true;
    while (improved && obj.evals < budget) {
      improved = false;
      for (int dim = 0; dim < 2; ++dim)
        for (double s : {step, -step}) {
          Vec2 y = best_y;
          y(dim) += s;
          const double v = cost(y);
          if (v < best) {
            best = v;
            best_y = y;
            improved = true;
          }
        }
    }
    if (step < 1e-6) {
      converged = true;
      break;
    }
    step *= 0.5;
  }

  DualPotentialResult res;
  res.y_star = best_y;
  res.converged = converged;
  res.in_paper_range = paper_range;
  res.evals = obj.evals;
  const EnergyValue ev = fan_integral(poly, best_y, k, spec);
  res.error = ev.error;
  switch (kind) {
    case DualPotentialKind::U1:
      res.value = ev.value;
      break;
    case DualPotentialKind::U2:
    case DualPotentialKind::U3:
      res.value = -ev.value;
      break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

ConstancyResidual potential_constancy_residual(const Shape& E, double alpha,
                                               const QuadratureSpec& spec,
                                               int boundary_samples) {
  const int n_pts = std::max(boundary_samples, 256);
  const auto pts = sample_boundary(E, n_pts);
  std::vector<double> vals(pts.size());
  const bool is_ball = std::holds_alternative<Ball>(E);
  Polygon2D poly;
  if (!is_ball) poly = as_polygon(E);
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    if (is_ball) {
      vals[i] = disk_potential(std::get<Ball>(E), pts[i], alpha, spec);
    } else {
      FanKernel k;
      k.q = alpha;
      vals[i] = fan_integral(poly, pts[i], k, spec).value;
    }
  });
  ConstancyResidual out;
  out.v_max = *std::max_element(vals.begin(), vals.end());
  out.v_min = *std::min_element(vals.begin(), vals.end());
  out.residual = out.v_max - out.v_min;
  out.error = spec.rel_tol * std::abs(out.v_max);
  return out;
}

LipschitzGap lipschitz_gap_bound(const Shape& E, const Shape& F, double alpha,
                                 const QuadratureSpec& spec) {
  LipschitzGap out;
  const double ve = volume(E), vf = volume(F);
  const double m = std::max(ve, vf);
  const int n = shape_dim(E);
  out.sym_diff = symmetric_difference_area(E, F);
  out.bound = riesz_lipschitz_constant(n, alpha) *
              std::pow(m, (n - alpha) / n) * out.sym_diff;
  out.gap = std::abs(interaction_energy(E, alpha, spec).value -
                     interaction_energy(F, alpha, spec).value);
  out.holds = out.gap <= out.bound + 1e-12;
  return out;
}

EnergyValue slicing_interaction_lhs(const Shape& E, double alpha,
                                    const QuadratureSpec& spec) {
  if (shape_dim(E) != 2)
    throw UnsupportedError("slicing_interaction_lhs: n = 2 only");
  if (alpha <= 0.0 || alpha >= 2.0)
    throw std::invalid_argument("slicing_interaction_lhs: alpha in (0, 2)");
  const double omega1 = 2.0;  // length of the unit interval ball
  EnergyValue inner;
  const double q = alpha - 1.0;
  if (const Box* b = std::get_if<Box>(&E); b && b->dim() == 2) {
    inner = box_interaction(b->sides, q, 3 * spec.outer_order);
  } else {
    FanKernel k;
    k.q = q;
    inner = polygon_interaction(as_polygon(E), k, spec);
  }
  return {2.0 * omega1 * inner.value, 2.0 * omega1 * inner.error};
}

SlicingBound slicing_bound_check(const Shape& E, const SurfaceTension& f,
                                 double alpha, const QuadratureSpec& spec) {
  SlicingBound out;
  out.lhs = slicing_interaction_lhs(E, alpha, spec).value;
  const Shape b1 = make_ball(2, VecX::Zero(2), 1.0);
  out.rhs = 2.0 * aniso_perimeter(b1, f) * volume(E);
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace anisodrop
