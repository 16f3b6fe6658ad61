#include "anisodrop/energy.hpp"

#include <algorithm>
#include <cmath>

#include "anisodrop/parallel.hpp"

namespace anisodrop {

namespace {

EnergyValue nonlocal_value(const Shape& E, const SurfaceTension& f,
                           NonlocalTerm term, const EnergyParams& params,
                           const QuadratureSpec& spec) {
  switch (term) {
    case NonlocalTerm::V:
      return interaction_energy(E, params.alpha, spec);
    case NonlocalTerm::Vf:
      return interaction_energy_aniso(E, f, params.alpha, spec);
    case NonlocalTerm::U1: {
      const auto r =
          dual_potential(E, f, DualPotentialKind::U1, params.alpha, spec);
      return {r.value, r.error};
    }
    case NonlocalTerm::U2: {
      const auto r =
          dual_potential(E, f, DualPotentialKind::U2, params.beta, spec);
      return {r.value, r.error};
    }
    case NonlocalTerm::U3: {
      const auto r = dual_potential(E, f, DualPotentialKind::U3, 0.0, spec);
      return {r.value, r.error};
    }
  }
  return {};
}

}  // namespace

EnergyBreakdown energy_with_term(const Shape& E, const SurfaceTension& f,
                                 NonlocalTerm term, double weight,
                                 const EnergyParams& params,
                                 const QuadratureSpec& spec) {
  EnergyBreakdown out;
  out.perimeter = aniso_perimeter(E, f);
  const EnergyValue nl = nonlocal_value(E, f, term, params, spec);
  out.nonlocal = nl.value;
  out.weight = weight;
  out.total = out.perimeter + weight * nl.value;
  out.error = std::abs(weight) * nl.error;
  out.rescaled = weight != 1.0;
  return out;
}

TotalEnergy total_energy(const Shape& E, const SurfaceTension& f,
                         const EnergyParams& params,
                         const QuadratureSpec& spec) {
  if (std::holds_alternative<GridMask>(E))
    throw UnsupportedError("total_energy: grid masks carry no perimeter");
  const double m = volume(E);
  const EnergyParams at_mass =
      EnergyParams::from_mass(params.n, params.alpha, m);

  TotalEnergy out;
  out.mass_form = energy_with_term(E, f, NonlocalTerm::V, 1.0, at_mass, spec);
  const Shape unit = rescale_to_volume(E, 1.0);
  out.rescaled_form = energy_with_term(unit, f, NonlocalTerm::V,
                                       at_mass.epsilon, at_mass, spec);
  out.rescaled_form.rescaled = true;
  return out;
}

double rectangle_energy(double a, double alpha, double eps,
                        const QuadratureSpec& spec) {
  if (a <= 0.0) throw std::invalid_argument("rectangle_energy: a > 0");
  VecX sides(2);
  sides << a, 1.0 / a;
  const int order = std::max(16, 2 * spec.outer_order);
  return (a + 1.0 / a) + eps * box_interaction(sides, alpha, order).value;
}

double box_energy(const VecX& free_sides, int n, double alpha, double eps,
                  const QuadratureSpec& spec) {
  if (n < 2 || n > 4)
    throw UnsupportedError("box_energy: n in {2, 3, 4}");
  if (free_sides.size() != n - 1)
    throw std::invalid_argument("box_energy: expected n - 1 free sides");
  if (free_sides.minCoeff() <= 0.0)
    throw std::invalid_argument("box_energy: sides must be positive");
  VecX sides(n);
  sides.head(n - 1) = free_sides;
  sides(n - 1) = 1.0 / free_sides.prod();
  // f = half the l1 norm: each facet pair contributes its facet measure.
  double perimeter = 0.0;
  for (int i = 0; i < n; ++i) {
    double facet = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) facet *= sides(j);
    perimeter += facet;
  }
  const int order = std::max(12, 2 * spec.outer_order);
  return perimeter + eps * box_interaction(sides, alpha, order).value;
}

VecX aniso_curvature(const ClosedCurve& c, const SurfaceTension& f) {
  if (!f.smooth())
    throw UnsupportedError(
        "aniso_curvature: crystalline tensions admit no pointwise H^f");
  const int m = c.size();
  const Points2 d = curve_derivative(c);
  Points2 w(2, m);
  for (int i = 0; i < m; ++i) {
    const Vec2 nu = rot_cw(d.col(i)).normalized();
    w.col(i) = Vec2(tension_gradient(f, VecX(nu)));
  }
  const Points2 dw = periodic_derivative(w);
  VecX h(m);
  for (int i = 0; i < m; ++i) {
    const double speed2 = d.col(i).squaredNorm();
    h(i) = d.col(i).dot(dw.col(i)) / speed2;
  }
  return h;
}

VariationReport el_residual(const Shape& E, const SurfaceTension& f,
                            const EnergyParams& params,
                            const QuadratureSpec& spec, int samples) {
  ClosedCurve curve;
  if (const Ball* b = std::get_if<Ball>(&E)) {
    if (b->dim != 2) throw UnsupportedError("el_residual: 2D shapes only");
    curve.pts.resize(2, samples);
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * M_PI * (i + 0.5) / samples;
      curve.pts.col(i) = Vec2(b->center(0), b->center(1)) +
                         b->radius * Vec2(std::cos(th), std::sin(th));
    }
  } else if (const StarDomain* s = std::get_if<StarDomain>(&E)) {
    if (s->base.crystalline())
      throw UnsupportedError("el_residual: smooth boundaries required");
    curve = s->curve();
  } else if (const Polygon2D* p = std::get_if<Polygon2D>(&E)) {
    if (p->loops.size() != 1)
      throw UnsupportedError("el_residual: single smooth boundary required");
    curve.pts.resize(2, p->loops[0].size());
    for (std::size_t i = 0; i < p->loops[0].size(); ++i)
      curve.pts.col(i) = p->loops[0][i];
  } else {
    throw UnsupportedError("el_residual: unsupported representation");
  }

  const int m = curve.size();
  VariationReport rep;
  rep.curvature = aniso_curvature(curve, f);
  rep.potential.resize(m);

  const bool is_ball = std::holds_alternative<Ball>(E);
  Polygon2D poly;
  if (!is_ball) {
    poly.loops.emplace_back(curve.pts.colwise().begin(),
                            curve.pts.colwise().end());
  }
  std::vector<double> vals(m);
  parallel_for(m, [&](int i) {
    const Vec2 x = curve.pts.col(i);
    if (is_ball) {
      vals[i] = riesz_potential(E, VecX(x), params.alpha, spec);
    } else {
      FanKernel k;
      k.q = params.alpha;
      vals[i] = fan_integral(poly, x, k, spec).value;
    }
  });
  for (int i = 0; i < m; ++i) rep.potential(i) = vals[i];

  rep.combined = rep.curvature + params.epsilon * rep.potential;
  const Points2 d = curve_derivative(curve);
  VecX w(m);
  for (int i = 0; i < m; ++i) w(i) = d.col(i).norm() / m;
  rep.arclength.resize(m);
  double s_acc = 0.0;
  for (int i = 0; i < m; ++i) {
    rep.arclength(i) = s_acc;
    s_acc += w(i);
  }
  rep.mu_hat = w.dot(rep.combined) / w.sum();
  rep.residual = rep.combined.maxCoeff() - rep.combined.minCoeff();
  const VecX centered = rep.combined.array() - rep.mu_hat;
  rep.stddev = std::sqrt(w.dot(VecX(centered.array().square())) / w.sum());
  return rep;
}

double first_variation_Ui(const WulffShape& K, const VecX& u,
                          DualPotentialKind kind) {
  if (u.size() != K.sample_count())
    throw std::invalid_argument("first_variation_Ui: one offset per sample");
  switch (kind) {
    case DualPotentialKind::U1:
      return K.weights.dot(u);
    case DualPotentialKind::U2:
      // U2 = -inf int f_*^beta and f_* = 1 on dK, so the outward derivative
      // carries a minus sign.
      return -K.weights.dot(u);
    case DualPotentialKind::U3:
      return 0.0;  // log f_* vanishes on dK
  }
  return 0.0;
}

double fd_first_variation_Ui(const WulffShape& K, const VecX& u,
                             DualPotentialKind kind, double exponent,
                             const QuadratureSpec& spec, double fd_step) {
  QuadratureSpec fixed = spec;
  fixed.adaptive_fan = false;  // keep the quadrature smooth in t
  fixed.angular_order = std::max(spec.angular_order, 12);
  auto value = [&](double t) {
    const Shape E = make_star(K, VecX(t * u));
    return dual_potential(E, K.tension, kind, exponent, fixed).value;
  };
  auto central = [&](double t) {
    return (value(t) - value(-t)) / (2.0 * t);
  };
  // Richardson extrapolation of the central difference at t and t/2.
  return (4.0 * central(0.5 * fd_step) - central(fd_step)) / 3.0;
}

FugledeReport fuglede_ratio(const WulffShape& K, const VecX& u,
                            const SurfaceTension& f) {
  if (u.size() != K.sample_count())
    throw std::invalid_argument("fuglede_ratio: one offset per sample");
  const StarDomain raw{K, u};
  const StarNorms raw_norms = star_norms(raw);
  if (raw_norms.c1_seminorm > 0.05 || raw_norms.linf > 0.05)
    throw std::invalid_argument(
        "fuglede_ratio: ||u||_C1 out of the small-perturbation regime");

  ClosedCurve base;
  base.pts = K.points;
  ClosedCurve cur = raw.curve();

  // Volume renormalization by dilation, then barycenter recentering.
  const double r = std::sqrt(curve_area(base) / curve_area(cur));
  cur.pts *= r;
  const Vec2 shift = curve_barycenter(base) - curve_barycenter(cur);
  cur.pts.colwise() += shift;

  const VecX u_corr = reproject_graph(K, cur);

  FugledeReport rep;
  const StarDomain corrected{K, u_corr};
  rep.corrected_norms = star_norms(corrected);
  rep.h1_sq = rep.corrected_norms.h1 * rep.corrected_norms.h1;
  rep.deficit = curve_perimeter(corrected.curve(), f) - curve_perimeter(base, f);
  if (rep.h1_sq < 1e-18) {
    rep.degenerate = true;
    rep.ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.ratio = rep.deficit / rep.h1_sq;
  }
  return rep;
}

VecX reproject_graph(const WulffShape& K, const ClosedCurve& target) {
  const int m = K.sample_count();
  const int mc = target.size();
  VecX u(m);
  const int window = std::max(8, mc / 16);
  for (int i = 0; i < m; ++i) {
    const Vec2 x = K.points.col(i), nu = K.normals.col(i);
    // Search the polyline segments near the matching parameter index.
    const int guess = static_cast<int>((static_cast<long>(i) * mc) / m);
    double best_t = 0.0, best_abs = std::numeric_limits<double>::infinity();
    for (int off = -window; off <= window; ++off) {
      const int j = (guess + off + mc) % mc;
      const Vec2 a = target.pts.col(j), b = target.pts.col((j + 1) % mc);
      const Vec2 e = b - a;
      const double denom = cross2(nu, e);
      if (std::abs(denom) < 1e-300) continue;
      // x + t nu = a + s e
      const double s = cross2(nu, x - a) / denom;
      if (s < -1e-12 || s > 1.0 + 1e-12) continue;
      const double t = -cross2(x - a, e) / denom;
      if (std::abs(t) < best_abs) {
        best_abs = std::abs(t);
        best_t = t;
      }
    }
    if (best_abs > 0.5 * K.ell)
      throw ConvergenceError("reproject_graph: curve is not a graph over dK");
    u(i) = best_t;
  }
  return u;
}

double split_bound_energy(long N, double eps, double alpha, int n,
                          double wulff_volume) {
  if (N < 1) throw std::invalid_argument("split_bound_energy: N >= 1");
  const double c = riesz_lipschitz_constant(n, alpha);
  return std::pow(static_cast<double>(N), 1.0 / n) *
             std::pow(wulff_volume, 1.0 / n) * n +
         eps * c * std::pow(static_cast<double>(N), (alpha - n) / double(n));
}

SplitBoundMin minimize_split_bound(double eps, double alpha, int n,
                                   double wulff_volume, long n_max) {
  SplitBoundMin best{1, split_bound_energy(1, eps, alpha, n, wulff_volume)};
  for (long N = 2; N <= n_max; ++N) {
    const double v = split_bound_energy(N, eps, alpha, n, wulff_volume);
    if (v < best.value) {
      best.value = v;
      best.argmin = N;
    }
    // The bound is unimodal in N; stop once clearly past the minimum.
    if (v > 4.0 * best.value && N > 4 * best.argmin) break;
  }
  return best;
}

}  // namespace anisodrop
