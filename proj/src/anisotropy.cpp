#include "anisodrop/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anisodrop/scalar_opt.hpp"

namespace anisodrop {

namespace {

constexpr double kHullEps = 1e-12;

}  // namespace

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return (a - b).norm() < kHullEps;
                        }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("crystalline: need >= 3 distinct points");
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 &&
           cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= kHullEps)
      --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lo = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lo &&
           cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= kHullEps)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  if (hull.size() < 3)
    throw std::invalid_argument("crystalline: points are collinear");
  return hull;  // CCW
}

namespace {

Vec2 unit_dir(double theta) { return Vec2(std::cos(theta), std::sin(theta)); }

}  // namespace

SurfaceTension SurfaceTension::euclidean(int dim) {
  if (dim < 2) throw std::invalid_argument("tension: dimension must be >= 2");
  SurfaceTension f;
  f.kind_ = TensionKind::Euclidean;
  f.dim_ = dim;
  return f;
}

SurfaceTension SurfaceTension::quadratic(const MatX& A) {
  if (A.rows() != A.cols() || A.rows() < 2)
    throw std::invalid_argument("quadratic tension: A must be square, n >= 2");
  if ((A - A.transpose()).norm() > 1e-12 * A.norm())
    throw std::invalid_argument("quadratic tension: A must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatX> es(A);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("quadratic tension: A must be positive definite");
  SurfaceTension f;
  f.kind_ = TensionKind::Quadratic;
  f.dim_ = static_cast<int>(A.rows());
  f.A_ = A;
  f.A_inv_ = A.inverse();
  return f;
}

SurfaceTension SurfaceTension::crystalline(const std::vector<VecX>& points) {
  if (points.empty()) throw std::invalid_argument("crystalline: empty point set");
  const int dim = static_cast<int>(points.front().size());
  for (const auto& p : points)
    if (p.size() != dim)
      throw std::invalid_argument("crystalline: inconsistent point dimensions");

  SurfaceTension f;
  f.kind_ = TensionKind::Crystalline;
  f.dim_ = dim;
  f.points_ = points;

  if (dim == 2) {
    std::vector<Vec2> pts2;
    pts2.reserve(points.size());
    for (const auto& p : points) pts2.emplace_back(p(0), p(1));
    f.hull_ = convex_hull_2d(pts2);
    const int m = static_cast<int>(f.hull_.size());
    double scale = 0.0;
    for (const auto& v : f.hull_) scale = std::max(scale, v.norm());
    for (int i = 0; i < m; ++i) {
      const Vec2 e = f.hull_[(i + 1) % m] - f.hull_[i];
      const Vec2 nrm = rot_cw(e).normalized();
      const double off = f.hull_[i].dot(nrm);
      if (off <= kHullEps * scale)
        throw std::invalid_argument(
            "crystalline: 0 not in the interior of conv{x_i}");
      f.hull_normals_.push_back(nrm);
      f.hull_offsets_.push_back(off);
    }
  } else {
    // Beyond 2D only axis-aligned boxes are supported: the point set must
    // be {(+-h_1, ..., +-h_n)}.
    VecX h = points.front().cwiseAbs();
    if (h.minCoeff() <= 0.0)
      throw UnsupportedError("crystalline nD: box vertex set required");
    if (static_cast<int>(points.size()) != (1 << dim))
      throw UnsupportedError("crystalline nD: box vertex set required");
    for (const auto& p : points)
      if ((p.cwiseAbs() - h).cwiseAbs().maxCoeff() > 1e-12 * h.maxCoeff())
        throw UnsupportedError("crystalline nD: box vertex set required");
    f.box_halves_.assign(h.data(), h.data() + dim);
  }
  return f;
}

SurfaceTension SurfaceTension::perturbed2d(
    double delta, const std::vector<std::pair<int, double>>& harmonics) {
  SurfaceTension f;
  f.kind_ = TensionKind::Perturbed2D;
  f.dim_ = 2;
  f.delta_ = delta;
  f.harmonics_ = harmonics;
  // Convexity certificate: the one-homogeneous extension of g is convex iff
  // g + g'' >= 0; require strict positivity on a dense angular grid.
  const int grid = 4096;
  for (int i = 0; i < grid; ++i) {
    const double th = 2.0 * M_PI * i / grid;
    const double g = f.profile(th);
    if (g <= 0.0)
      throw std::invalid_argument("perturbed tension: profile not positive");
    if (g + f.profile_d2(th) <= 0.0)
      throw std::invalid_argument(
          "perturbed tension: convexity certificate failed (delta too large)");
  }
  return f;
}

double SurfaceTension::profile(double theta) const {
  double g = 1.0;
  for (const auto& [k, c] : harmonics_) g += delta_ * c * std::cos(k * theta);
  return g;
}

double SurfaceTension::profile_d1(double theta) const {
  double g = 0.0;
  for (const auto& [k, c] : harmonics_) g -= delta_ * c * k * std::sin(k * theta);
  return g;
}

double SurfaceTension::profile_d2(double theta) const {
  double g = 0.0;
  for (const auto& [k, c] : harmonics_)
    g -= delta_ * c * k * k * std::cos(k * theta);
  return g;
}

double eval_tension(const SurfaceTension& f, const VecX& nu) {
  if (nu.size() != f.dim())
    throw std::invalid_argument("eval_tension: dimension mismatch");
  const double r = nu.norm();
  if (r == 0.0) return 0.0;
  switch (f.kind()) {
    case TensionKind::Euclidean:
      return r;
    case TensionKind::Quadratic:
      return (f.matrix() * nu).norm();
    case TensionKind::Crystalline: {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : f.points()) best = std::max(best, p.dot(nu));
      return best;
    }
    case TensionKind::Perturbed2D: {
      const double th = std::atan2(nu(1), nu(0));
      return r * f.profile(th);
    }
  }
  return 0.0;
}

double eval_dual(const SurfaceTension& f, const VecX& x) {
  if (x.size() != f.dim())
    throw std::invalid_argument("eval_dual: dimension mismatch");
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  switch (f.kind()) {
    case TensionKind::Euclidean:
      return r;
    case TensionKind::Quadratic:
      return (f.matrix_inverse() * x).norm();
    case TensionKind::Crystalline: {
      if (f.dim() == 2) {
        // Gauge of the hull polygon: max over edges of (x.n_e)/h_e.
        double best = 0.0;
        const Vec2 x2(x(0), x(1));
        for (std::size_t i = 0; i < f.hull_normals_.size(); ++i)
          best = std::max(best, x2.dot(f.hull_normals_[i]) / f.hull_offsets_[i]);
        return best;
      }
      double best = 0.0;
      for (int i = 0; i < f.dim(); ++i)
        best = std::max(best, std::abs(x(i)) / f.box_halves_[i]);
      return best;
    }
    case TensionKind::Perturbed2D: {
      // sup over directions of x.u(phi) / g(phi): dense scan plus golden
      // refinement around the best cell.
      const double base = std::atan2(x(1), x(0));
      const int grid = 512;
      auto val = [&](double phi) {
        return (x(0) * std::cos(phi) + x(1) * std::sin(phi)) / f.profile(phi);
      };
      double best_phi = base, best = val(base);
      for (int i = 0; i < grid; ++i) {
        const double phi = base - M_PI + 2.0 * M_PI * i / grid;
        const double v = val(phi);
        if (v > best) {
          best = v;
          best_phi = phi;
        }
      }
      const double h = 2.0 * M_PI / grid;
      auto [phi, v] = golden_max(val, best_phi - h, best_phi + h, 1e-12);
      return std::max(best, v);
    }
  }
  return 0.0;
}

VecX tension_gradient(const SurfaceTension& f, const VecX& nu) {
  const double r = nu.norm();
  if (r == 0.0) throw std::invalid_argument("tension_gradient: nu = 0");
  switch (f.kind()) {
    case TensionKind::Euclidean:
      return nu / r;
    case TensionKind::Quadratic: {
      const VecX Anu = f.matrix() * nu;
      return f.matrix() * Anu / Anu.norm();
    }
    case TensionKind::Perturbed2D: {
      const double th = std::atan2(nu(1), nu(0));
      const Vec2 u = unit_dir(th), up = rot_ccw(u);
      const Vec2 g = f.profile(th) * u + f.profile_d1(th) * up;
      return VecX(g);
    }
    case TensionKind::Crystalline:
      throw UnsupportedError("tension_gradient: crystalline tension is not smooth");
  }
  return VecX();
}

std::pair<double, double> tension_range(const SurfaceTension& f) {
  switch (f.kind()) {
    case TensionKind::Euclidean:
      return {1.0, 1.0};
    case TensionKind::Quadratic: {
      Eigen::SelfAdjointEigenSolver<MatX> es(f.matrix());
      return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    }
    case TensionKind::Crystalline: {
      if (f.dim() == 2) {
        // min of the support function over the sphere sits at an edge
        // normal, the max at a vertex direction.
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double off : f.hull_offsets_) lo = std::min(lo, off);
        for (const auto& v : f.hull_) hi = std::max(hi, v.norm());
        return {lo, hi};
      }
      double lo = std::numeric_limits<double>::infinity(), sq = 0.0;
      for (double h : f.box_halves_) {
        lo = std::min(lo, h);
        sq += h * h;
      }
      return {lo, std::sqrt(sq)};
    }
    case TensionKind::Perturbed2D: {
      const int grid = 4096;
      double lo_th = 0.0, hi_th = 0.0;
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (int i = 0; i < grid; ++i) {
        const double th = 2.0 * M_PI * i / grid;
        const double g = f.profile(th);
        if (g < lo) {
          lo = g;
          lo_th = th;
        }
        if (g > hi) {
          hi = g;
          hi_th = th;
        }
      }
      const double h = 2.0 * M_PI / grid;
      auto prof = [&f](double th) { return f.profile(th); };
      auto [tl, vl] = golden_min(prof, lo_th - h, lo_th + h, 1e-12);
      auto [th2, vh] = golden_max(prof, hi_th - h, hi_th + h, 1e-12);
      return {std::min(lo, vl), std::max(hi, vh)};
    }
  }
  return {0.0, 0.0};
}

namespace {

WulffShape build_crystalline(const SurfaceTension& f, int M) {
  const auto& hull = f.hull();
  const int m = static_cast<int>(hull.size());
  std::vector<double> lens(m);
  double total = 0.0, area2 = 0.0;
  for (int i = 0; i < m; ++i) {
    lens[i] = (hull[(i + 1) % m] - hull[i]).norm();
    total += lens[i];
    area2 += cross2(hull[i], hull[(i + 1) % m]);
  }
  // At least one node per edge, the rest distributed by length.
  std::vector<int> counts(m, 1);
  int rem = std::max(0, M - m);
  for (int i = 0; i < m; ++i)
    counts[i] += static_cast<int>(std::floor(rem * lens[i] / total));
  int placed = std::accumulate(counts.begin(), counts.end(), 0);
  for (int i = 0; placed < M; i = (i + 1) % m, ++placed) ++counts[i];

  WulffShape K;
  K.tension = f;
  const int n_total = std::accumulate(counts.begin(), counts.end(), 0);
  K.points.resize(2, n_total);
  K.normals.resize(2, n_total);
  K.weights.resize(n_total);
  int idx = 0;
  for (int i = 0; i < m; ++i) {
    const Vec2 a = hull[i], b = hull[(i + 1) % m];
    const Vec2 nrm = rot_cw(b - a).normalized();
    for (int j = 0; j < counts[i]; ++j) {
      const double t = (j + 0.5) / counts[i];
      K.points.col(idx) = a + t * (b - a);
      K.normals.col(idx) = nrm;
      K.weights(idx) = lens[i] / counts[i];
      ++idx;
    }
  }
  K.volume = 0.5 * area2;
  K.polygon_vertices = hull;
  auto [lo, hi] = tension_range(f);
  K.ell = lo;
  K.ell_cap = hi;
  return K;
}

WulffShape build_smooth(const SurfaceTension& f, int M) {
  WulffShape K;
  K.tension = f;
  K.points.resize(2, M);
  K.normals.resize(2, M);
  K.weights.resize(M);
  const double dth = 2.0 * M_PI / M;
  double area2 = 0.0;
  for (int i = 0; i < M; ++i) {
    const double th = dth * (i + 0.5);
    const Vec2 u = unit_dir(th), up = rot_ccw(u);
    Vec2 x, xp;  // boundary point and analytic tangent dx/dtheta
    switch (f.kind()) {
      case TensionKind::Euclidean:
        x = u;
        xp = up;
        break;
      case TensionKind::Quadratic: {
        const Mat2 A = f.matrix();
        const Vec2 Au = A * u, Aup = A * up;
        const double nAu = Au.norm();
        x = A * Au / nAu;
        xp = A * Aup / nAu - (A * Au) * (Au.dot(Aup) / (nAu * nAu * nAu));
        break;
      }
      case TensionKind::Perturbed2D: {
        const double g = f.profile(th), g1 = f.profile_d1(th),
                     g2 = f.profile_d2(th);
        x = g * u + g1 * up;
        xp = (g + g2) * up;
        break;
      }
      default:
        throw UnsupportedError("build_wulff: unexpected tension kind");
    }
    K.points.col(i) = x;
    K.normals.col(i) = u;
    K.weights(i) = xp.norm() * dth;
    area2 += cross2(x, xp) * dth;
  }
  K.volume = 0.5 * area2;
  auto [lo, hi] = tension_range(f);
  K.ell = lo;
  K.ell_cap = hi;
  return K;
}

}  // namespace

WulffShape build_wulff(const SurfaceTension& f, int sample_count) {
  if (sample_count < 16)
    throw std::invalid_argument("build_wulff: need at least 16 samples");
  if (f.dim() != 2)
    throw UnsupportedError("build_wulff: only 2D tensions are realized");
  if (f.kind() == TensionKind::Crystalline)
    return build_crystalline(f, sample_count);
  return build_smooth(f, sample_count);
}

double wulff_perimeter(const WulffShape& K) {
  double p = 0.0;
  for (int i = 0; i < K.sample_count(); ++i)
    p += K.weights(i) * eval_tension(K.tension, Vec2(K.normals.col(i)));
  return p;
}

}  // namespace anisodrop
