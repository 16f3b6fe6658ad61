#include "anisodrop/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "anisodrop/scalar_opt.hpp"

namespace anisodrop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Family plumbing
// ---------------------------------------------------------------------------

std::vector<Vec2> regular_ngon(double radius, int n) {
  std::vector<Vec2> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * i / n;
    v.emplace_back(radius * std::cos(th), radius * std::sin(th));
  }
  return v;
}

// Brute-force half-plane intersection {x . n_i <= h_i}; empty optional when
// infeasible or degenerate.
std::optional<std::vector<Vec2>> halfplane_polygon(
    const std::vector<Vec2>& normals, const VecX& offsets) {
  const int n = static_cast<int>(normals.size());
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(offsets(i)));
  std::vector<Vec2> cand;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double det = cross2(normals[i], normals[j]);
      if (std::abs(det) < 1e-12) continue;
      const Vec2 x((offsets(i) * normals[j].y() - offsets(j) * normals[i].y()) / det,
                   (offsets(j) * normals[i].x() - offsets(i) * normals[j].x()) / det);
      bool ok = true;
      for (int k = 0; k < n && ok; ++k)
        ok = x.dot(normals[k]) <= offsets(k) + 1e-10 * (scale + 1.0);
      if (ok) cand.push_back(x);
    }
  if (cand.size() < 3) return std::nullopt;
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : cand) centroid += p;
  centroid /= static_cast<double>(cand.size());
  std::sort(cand.begin(), cand.end(), [&](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
           std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [&](const Vec2& a, const Vec2& b) {
                           return (a - b).norm() < 1e-10 * (scale + 1.0);
                         }),
             cand.end());
  if (cand.size() < 3) return std::nullopt;
  return cand;
}

struct FamilyOps {
  std::string name;
  int dim = 0;
  VecX lo, hi;     // box bounds
  VecX start;      // unperturbed configuration (restart 0)
  double step = 0.1;
  std::function<double(const VecX&)> objective;
  std::function<double(const VecX&)> perimeter;
  std::function<Shape(const VecX&)> shape;
  std::function<VecX(const VecX&)> canonical;  // may be empty
};

FamilyOps make_ops(const BoxFamily& fam, const EnergyParams& params,
                   const QuadratureSpec& spec) {
  FamilyOps ops;
  ops.name = "box";
  ops.dim = fam.n - 1;
  ops.lo = VecX::Constant(ops.dim, fam.s_min);
  ops.hi = VecX::Constant(ops.dim, fam.s_max);
  ops.start = VecX::Ones(ops.dim);
  ops.step = 0.05;
  const int n = fam.n;
  const double alpha = params.alpha, eps = params.epsilon;
  ops.objective = [n, alpha, eps, spec](const VecX& s) {
    return box_energy(s, n, alpha, eps, spec);
  };
  ops.perimeter = [n, alpha, spec](const VecX& s) {
    return box_energy(s, n, alpha, 0.0, spec);
  };
  ops.shape = [n](const VecX& s) {
    VecX sides(n);
    sides.head(n - 1) = s;
    sides(n - 1) = 1.0 / s.prod();
    return make_box(sides);
  };
  return ops;
}

FamilyOps make_ops(const PolygonFixedNormalsFamily& fam,
                   const EnergyParams& params, const QuadratureSpec& spec) {
  if (fam.tension.kind() != TensionKind::Crystalline || fam.tension.dim() != 2)
    throw UnsupportedError(
        "PolygonFixedNormals: 2D crystalline tension required");
  const WulffShape K = build_wulff(fam.tension, 64);
  const auto& hull = K.polygon_vertices;
  const int ne = static_cast<int>(hull.size());
  std::vector<Vec2> normals(ne);
  VecX wulff_offsets(ne);
  for (int i = 0; i < ne; ++i) {
    normals[i] = rot_cw(hull[(i + 1) % ne] - hull[i]).normalized();
    wulff_offsets(i) = hull[i].dot(normals[i]);
  }

  FamilyOps ops;
  ops.name = "polygon_fixed_normals";
  ops.dim = ne;
  ops.lo = VecX::Constant(ne, fam.offset_min);
  ops.hi = VecX::Constant(ne, fam.offset_max);
  ops.start = wulff_offsets;
  ops.step = 0.05;
  const SurfaceTension f = fam.tension;
  const double target = fam.target_volume;
  const double alpha = params.alpha, eps = params.epsilon;

  auto build = [normals, target](const VecX& h) -> std::optional<Shape> {
    auto poly = halfplane_polygon(normals, h);
    if (!poly) return std::nullopt;
    Shape s = make_polygon(*poly);
    s = rescale_to_volume(s, target);
    // Recenter so translation-equivalent offset vectors coincide.
    const VecX bc = barycenter(s);
    Polygon2D p = std::get<Polygon2D>(s);
    for (auto& loop : p.loops)
      for (auto& v : loop) v -= Vec2(bc(0), bc(1));
    return Shape{p};
  };
  ops.shape = [build](const VecX& h) {
    auto s = build(h);
    if (!s) throw std::invalid_argument("polygon family: infeasible offsets");
    return *s;
  };
  ops.objective = [build, f, alpha, eps, spec](const VecX& h) {
    auto s = build(h);
    if (!s) return 1e100;  // infeasible proposals are rejected by cost
    return aniso_perimeter(*s, f) +
           eps * interaction_energy(*s, alpha, spec).value;
  };
  ops.perimeter = [build, f](const VecX& h) {
    auto s = build(h);
    return s ? aniso_perimeter(*s, f) : 1e100;
  };
  return ops;
}

FamilyOps make_ops(const StarFourierFamily& fam, const EnergyParams& params,
                   const QuadratureSpec& spec) {
  if (fam.base.crystalline())
    throw UnsupportedError("StarFourier: smooth Wulff base required");
  FamilyOps ops;
  ops.name = "star_fourier";
  ops.dim = 2 * fam.k_max;
  ops.lo = VecX::Constant(ops.dim, -fam.coef_bound);
  ops.hi = VecX::Constant(ops.dim, fam.coef_bound);
  ops.start = VecX::Zero(ops.dim);
  ops.step = 0.25 * fam.coef_bound;

  const WulffShape base = fam.base;
  const int m = base.sample_count();
  VecX thetas(m);
  for (int i = 0; i < m; ++i)
    thetas(i) = std::atan2(base.normals(1, i), base.normals(0, i));
  const double vol_K = base.volume;
  const Vec2 bar_K = [&] {
    ClosedCurve c;
    c.pts = base.points;
    return curve_barycenter(c);
  }();

  auto field = [thetas, m, kmax = fam.k_max](const VecX& coef) {
    VecX u = VecX::Zero(m);
    for (int k = 1; k <= kmax; ++k)
      for (int i = 0; i < m; ++i)
        u(i) += coef(2 * (k - 1)) * std::cos(k * thetas(i)) +
                coef(2 * (k - 1) + 1) * std::sin(k * thetas(i));
    return u;
  };
  auto corrected_curve = [base, vol_K, bar_K, field](const VecX& coef) {
    ClosedCurve c;
    c.pts = base.points;
    const VecX u = field(coef);
    for (int i = 0; i < base.sample_count(); ++i)
      c.pts.col(i) += u(i) * base.normals.col(i);
    const double r = std::sqrt(vol_K / curve_area(c));
    c.pts *= r;
    const Vec2 shift = bar_K - curve_barycenter(c);
    c.pts.colwise() += shift;
    return c;
  };

  const SurfaceTension f = base.tension;
  const NonlocalTerm term = fam.term;
  const double eps = params.epsilon;
  EnergyParams p = params;
  ops.objective = [corrected_curve, f, term, eps, p, spec](const VecX& coef) {
    const ClosedCurve c = corrected_curve(coef);
    const double perim = curve_perimeter(c, f);
    double nl = 0.0;
    if (term == NonlocalTerm::V) {
      nl = interaction_energy_boundary(c, p.alpha);
    } else {
      Polygon2D poly;
      poly.loops.emplace_back(c.pts.colwise().begin(), c.pts.colwise().end());
      const Shape s{poly};
      switch (term) {
        case NonlocalTerm::U1:
          nl = dual_potential(s, f, DualPotentialKind::U1, p.alpha, spec).value;
          break;
        case NonlocalTerm::U2:
          nl = dual_potential(s, f, DualPotentialKind::U2, p.beta, spec).value;
          break;
        case NonlocalTerm::U3:
          nl = dual_potential(s, f, DualPotentialKind::U3, 0.0, spec).value;
          break;
        default:
          nl = interaction_energy_aniso(s, f, p.alpha, spec).value;
      }
    }
    return perim + eps * nl;
  };
  ops.perimeter = [corrected_curve, f](const VecX& coef) {
    return curve_perimeter(corrected_curve(coef), f);
  };
  ops.shape = [corrected_curve, base](const VecX& coef) -> Shape {
    const ClosedCurve c = corrected_curve(coef);
    Polygon2D poly;
    poly.loops.emplace_back(c.pts.colwise().begin(), c.pts.colwise().end());
    return poly;
  };
  ops.canonical = [corrected_curve, base](const VecX& coef) {
    return reproject_graph(base, corrected_curve(coef));
  };
  return ops;
}

FamilyOps make_family_ops(const ShapeFamily& family, const EnergyParams& params,
                          const QuadratureSpec& spec) {
  return std::visit(
      [&](const auto& fam) -> FamilyOps {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, RectangleFamily>) {
          FamilyOps ops;
          ops.name = "rectangle";
          ops.dim = 1;
          ops.lo = VecX::Constant(1, fam.a_min);
          ops.hi = VecX::Constant(1, fam.a_max);
          ops.start = VecX::Ones(1);
          ops.step = 0.05;
          const double alpha = params.alpha, eps = params.epsilon;
          ops.objective = [alpha, eps, spec](const VecX& x) {
            return rectangle_energy(x(0), alpha, eps, spec);
          };
          ops.perimeter = [](const VecX& x) { return x(0) + 1.0 / x(0); };
          ops.shape = [](const VecX& x) {
            VecX sides(2);
            sides << x(0), 1.0 / x(0);
            return make_box(sides);
          };
          return ops;
        } else {
          return make_ops(fam, params, spec);
        }
      },
      family);
}

// ---------------------------------------------------------------------------
// Nelder-Mead with restarts
// ---------------------------------------------------------------------------

struct NmResult {
  VecX x;
  double value = 0.0;
  bool converged = false;
  std::vector<double> trace;
};

NmResult nelder_mead(const FamilyOps& ops, const VecX& x0, double step,
                     int max_iter) {
  const int d = ops.dim;
  auto clamp = [&](VecX x) {
    return VecX(x.cwiseMax(ops.lo).cwiseMin(ops.hi));
  };
  std::vector<VecX> xs;
  std::vector<double> fs;
  xs.push_back(clamp(x0));
  fs.push_back(ops.objective(xs[0]));
  for (int k = 0; k < d; ++k) {
    VecX x = xs[0];
    x(k) += (x(k) + step <= ops.hi(k)) ? step : -step;
    xs.push_back(clamp(x));
    fs.push_back(ops.objective(xs.back()));
  }

  NmResult res;
  std::vector<int> idx(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = idx[0], worst = idx[d], second = idx[d - 1];
    res.trace.push_back(fs[best]);

    double spread = 0.0;
    for (int k = 0; k <= d; ++k)
      spread = std::max(spread, (xs[k] - xs[best]).cwiseAbs().maxCoeff());
    if (spread < 1e-8 && fs[worst] - fs[best] < 1e-12 * (1.0 + std::abs(fs[best]))) {
      res.converged = true;
      break;
    }

    VecX centroid = VecX::Zero(d);
    for (int k = 0; k <= d; ++k)
      if (k != worst) centroid += xs[k];
    centroid /= d;

    const VecX xr = clamp(centroid + (centroid - xs[worst]));
    const double fr = ops.objective(xr);
    if (fr < fs[best]) {
      const VecX xe = clamp(centroid + 2.0 * (centroid - xs[worst]));
      const double fe = ops.objective(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const VecX xc = clamp(centroid + 0.5 * (xs[worst] - centroid));
      const double fc = ops.objective(xc);
      if (fc < fs[worst]) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int k = 0; k <= d; ++k) {
          if (k == best) continue;
          xs[k] = clamp(xs[best] + 0.5 * (xs[k] - xs[best]));
          fs[k] = ops.objective(xs[k]);
        }
      }
    }
  }
  int best = 0;
  for (int k = 1; k <= d; ++k)
    if (fs[k] < fs[best]) best = k;
  res.x = xs[best];
  res.value = fs[best];
  return res;
}

// Deterministic coordinate-descent polish; strict improvements only, so
// exact flat directions (translations of the Wulff shape) cause no drift.
void polish(const FamilyOps& ops, VecX& x, double& fx, double step0) {
  double step = step0;
  while (step > 1e-7) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int k = 0; k < ops.dim; ++k)
        for (double s : {step, -step}) {
          VecX y = x;
          y(k) = std::clamp(y(k) + s, ops.lo(k), ops.hi(k));
          if (y(k) == x(k)) continue;
          const double fy = ops.objective(y);
          if (fy < fx) {
            x = y;
            fx = fy;
            improved = true;
          }
        }
    }
    step *= 0.5;
  }
}

OptimizationReport run_nd(const FamilyOps& ops, const QuadratureSpec& spec) {
  const auto t0 = Clock::now();
  const int restarts = 5;
  std::vector<NmResult> results;
  for (int r = 0; r < restarts; ++r) {
    VecX x0 = ops.start;
    if (r > 0) {
      std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(r));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int k = 0; k < ops.dim; ++k)
        x0(k) = ops.lo(k) + unif(rng) * (ops.hi(k) - ops.lo(k));
    }
    results.push_back(nelder_mead(ops, x0, ops.step, 250 * ops.dim));
  }
  // Lowest energy wins; ties break toward the smallest parameter norm.
  int best = 0;
  for (int r = 1; r < restarts; ++r) {
    const double tie = 1e-8 * (1.0 + std::abs(results[best].value));
    if (results[r].value < results[best].value - tie)
      best = r;
    else if (std::abs(results[r].value - results[best].value) <= tie &&
             results[r].x.norm() < results[best].x.norm())
      best = r;
  }
  VecX x = results[best].x;
  double fx = results[best].value;
  polish(ops, x, fx, ops.step * 0.5);

  OptimizationReport rep;
  rep.family = ops.name;
  rep.best_params = x;
  rep.best_shape = ops.shape(x);
  rep.trace = results[best].trace;
  rep.converged = results[best].converged;
  if (ops.canonical) rep.canonical_field = ops.canonical(x);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace

OptimizationReport minimize_1d(const RectangleFamily& family,
                               const EnergyParams& params,
                               const QuadratureSpec& spec) {
  if (!(family.a_min > 0.0) || !(family.a_max > family.a_min))
    throw std::invalid_argument("minimize_1d: invalid a-range");
  const auto t0 = Clock::now();
  auto energy = [&](double a) {
    return rectangle_energy(a, params.alpha, params.epsilon, spec);
  };

  // Pre-scan to bracket the minimum (the objective need not be unimodal on
  // the whole range).
  const int scan_n = 64;
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<double> grid(scan_n), vals(scan_n);
  for (int i = 0; i < scan_n; ++i) {
    grid[i] = family.a_min +
              (family.a_max - family.a_min) * i / double(scan_n - 1);
    vals[i] = energy(grid[i]);
    if (vals[i] < best_v) {
      best_v = vals[i];
      best_i = i;
    }
  }

  OptimizationReport rep;
  rep.family = "rectangle";
  if (best_i == 0 || best_i == scan_n - 1) {
    rep.boundary_hit = true;
    rep.converged = false;
    rep.best_params = VecX::Constant(1, grid[best_i]);
  } else {
    auto [a_star, v_star] =
        golden_min(energy, grid[best_i - 1], grid[best_i + 1], 1e-6);
    rep.best_params = VecX::Constant(1, a_star);
    rep.converged = true;
    rep.trace = {vals[best_i], v_star};
  }
  VecX sides(2);
  sides << rep.best_params(0), 1.0 / rep.best_params(0);
  rep.best_shape = make_box(sides);
  rep.energy = energy_with_term(rep.best_shape,
                                SurfaceTension::crystalline(
                                    {VecX(Vec2(0.5, 0.5)), VecX(Vec2(0.5, -0.5)),
                                     VecX(Vec2(-0.5, 0.5)),
                                     VecX(Vec2(-0.5, -0.5))}),
                                NonlocalTerm::V, params.epsilon, params, spec);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

OptimizationReport minimize_nd(const ShapeFamily& family,
                               const EnergyParams& params,
                               const QuadratureSpec& spec) {
  FamilyOps ops = make_family_ops(family, params, spec);
  OptimizationReport rep = run_nd(ops, spec);
  rep.energy.total = ops.objective(rep.best_params);
  rep.energy.perimeter = ops.perimeter(rep.best_params);
  rep.energy.weight = params.epsilon;
  rep.energy.nonlocal =
      (rep.energy.total - rep.energy.perimeter) / params.epsilon;
  rep.energy.rescaled = true;
  return rep;
}

std::vector<OptimizationReport> scan(const ShapeFamily& family,
                                     const EnergyParams& base,
                                     const std::vector<double>& eps_sweep,
                                     const QuadratureSpec& spec) {
  if (eps_sweep.empty()) throw std::invalid_argument("scan: empty sweep");
  std::vector<OptimizationReport> out;
  std::optional<VecX> warm;
  for (double eps : eps_sweep) {
    const EnergyParams p = EnergyParams::from_epsilon(base.n, base.alpha, eps);
    try {
      if (std::holds_alternative<RectangleFamily>(family)) {
        out.push_back(minimize_1d(std::get<RectangleFamily>(family), p, spec));
      } else {
        FamilyOps ops = make_family_ops(family, p, spec);
        if (warm) ops.start = *warm;
        OptimizationReport rep = run_nd(ops, spec);
        rep.energy.total = ops.objective(rep.best_params);
        out.push_back(std::move(rep));
      }
      warm = out.back().best_params;
    } catch (const std::exception& e) {
      OptimizationReport failed;
      failed.family = "failed: " + std::string(e.what());
      failed.converged = false;
      out.push_back(std::move(failed));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncation non-optimality check
// ---------------------------------------------------------------------------

namespace {

// Length of the parts of segment [a,b] inside the polygon.
double segment_length_inside(const Polygon2D& P, const Vec2& a, const Vec2& b) {
  std::vector<double> ts{0.0, 1.0};
  const Vec2 e = b - a;
  for (const auto& loop : P.loops) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
      const Vec2 c = loop[i], d = loop[(i + 1) % n];
      const double denom = cross2(e, d - c);
      if (std::abs(denom) < 1e-300) continue;
      const double t = cross2(c - a, d - c) / denom;
      const double s = cross2(c - a, e) / denom;
      if (t > 0.0 && t < 1.0 && s >= 0.0 && s < 1.0) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double mid = 0.5 * (ts[i] + ts[i + 1]);
    if (polygon_contains(P, a + mid * e)) len += (ts[i + 1] - ts[i]) * e.norm();
  }
  return len;
}

// Interval of [0,1] along segment [a,b] inside the convex polygon.
double segment_length_in_convex(const std::vector<Vec2>& convex, const Vec2& a,
                                const Vec2& b) {
  double t0 = 0.0, t1 = 1.0;
  const int n = static_cast<int>(convex.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 nrm = rot_cw(convex[(i + 1) % n] - convex[i]).normalized();
    const double h = convex[i].dot(nrm);
    const double pa = a.dot(nrm) - h, pb = b.dot(nrm) - h;
    const double d = pb - pa;
    if (std::abs(d) < 1e-300) {
      if (pa > 0.0) return 0.0;
      continue;
    }
    const double t = -pa / d;
    if (d > 0.0)
      t1 = std::min(t1, t);
    else
      t0 = std::max(t0, t);
  }
  return std::max(0.0, t1 - t0) * (b - a).norm();
}

}  // namespace

TruncationReport truncation_check(const Shape& F, const SurfaceTension& f,
                                  const EnergyParams& params,
                                  const std::vector<double>& rho_grid,
                                  double delta0, const QuadratureSpec& spec) {
  const Polygon2D poly = as_polygon(F);
  const double vol_f = polygon_area(poly);
  if (std::abs(vol_f - 1.0) > 1e-6)
    throw std::invalid_argument("truncation_check: |F| = 1 required");
  const double perim_f = aniso_perimeter(F, f);
  const double energy_f =
      perim_f + params.epsilon * interaction_energy(F, params.alpha, spec).value;

  const int n = params.n;
  const double mass_cap =
      delta0 * std::min(1.0, std::pow(params.epsilon,
                                      -double(n) / (n + 1.0 - params.alpha)));

  TruncationReport rep;
  for (double rho : rho_grid) {
    TruncationEntry e;
    e.rho = rho;
    const std::vector<Vec2> ball = regular_ngon(rho, 64);
    {
      const Shape circle = make_ball(2, VecX::Zero(2), rho);
      e.ball_polygonization_error = std::abs(
          aniso_perimeter(Shape{Polygon2D{{ball}}}, f) -
          aniso_perimeter(circle, f));
    }

    const Polygon2D f1 = clip_to_convex(poly, ball);
    const double vol_f1 = polygon_area(f1);
    e.vol_f2 = vol_f - vol_f1;

    if (f1.empty() || e.vol_f2 <= 1e-12) {
      // No nontrivial split at this radius.
      e.energy_f = energy_f;
      rep.entries.push_back(e);
      continue;
    }

    // P_f of dF inside the ball, exact per-edge interval clipping.
    double L_in = 0.0;
    for (const auto& loop : poly.loops) {
      const int nv = static_cast<int>(loop.size());
      for (int i = 0; i < nv; ++i) {
        const Vec2 a = loop[i], b = loop[(i + 1) % nv];
        const double inside = segment_length_in_convex(ball, a, b);
        if (inside > 0.0)
          L_in += inside * eval_tension(f, rot_cw(Vec2(b - a)).normalized());
      }
    }
    // Cut terms along dB inside F.
    double cut_plus = 0.0, cut_minus = 0.0;
    for (int i = 0; i < 64; ++i) {
      const Vec2 a = ball[i], b = ball[(i + 1) % 64];
      const double len = segment_length_inside(poly, a, b);
      if (len > 0.0) {
        const Vec2 nrm = rot_cw(Vec2(b - a)).normalized();
        cut_plus += len * eval_tension(f, nrm);
        cut_minus += len * eval_tension(f, Vec2(-nrm));
      }
    }
    const double perim_f1 = L_in + cut_plus;
    const double perim_f2 = (perim_f - L_in) + cut_minus;

    e.perimeter_gain = perim_f1 + perim_f2 - perim_f;
    e.small_gain_rhs = 0.5 * perim_f2;
    e.small_gain_ok = e.perimeter_gain <= e.small_gain_rhs;
    e.small_mass_ok = e.vol_f2 <= mass_cap;
    e.admissible = e.small_gain_ok && e.small_mass_ok && vol_f1 > 1e-12;
    e.energy_f = energy_f;

    if (e.admissible) {
      const Shape f1_hat = rescale_to_volume(Shape{f1}, 1.0);
      e.energy_f1hat =
          aniso_perimeter(f1_hat, f) +
          params.epsilon * interaction_energy(f1_hat, params.alpha, spec).value;
      e.improved = e.energy_f1hat < energy_f;
      rep.any_improvement |= e.improved;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace anisodrop
