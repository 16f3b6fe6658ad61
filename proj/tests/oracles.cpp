#include "oracles.hpp"

#include <cmath>
#include <random>

namespace anisodrop::oracle {

double mc_area(const std::function<bool(const Vec2&)>& inside, const Vec2& lo,
               const Vec2& hi, long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long grid = std::max(2L, static_cast<long>(std::sqrt(samples / 2.0)));
  const Vec2 span = hi - lo;
  const Vec2 cell = span / static_cast<double>(grid);
  long hits = 0, total = 0;
  for (long iy = 0; iy < grid; ++iy)
    for (long ix = 0; ix < grid; ++ix) {
      const Vec2 base = lo + Vec2(ix * cell.x(), iy * cell.y());
      const Vec2 j(unif(rng), unif(rng));
      const Vec2 p = base + Vec2(j.x() * cell.x(), j.y() * cell.y());
      const Vec2 q = base + Vec2((1.0 - j.x()) * cell.x(),
                                 (1.0 - j.y()) * cell.y());  // antithetic
      hits += inside(p);
      hits += inside(q);
      total += 2;
    }
  return span.x() * span.y() * static_cast<double>(hits) / total;
}

double mc_riesz_potential(const Shape& E, const Vec2& x, double alpha,
                          long samples, std::uint64_t seed) {
  auto [lo, hi] = bounding_box(E);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long grid = std::max(4L, static_cast<long>(std::sqrt(samples / 2.0)));
  const Vec2 span = hi - lo;
  const Vec2 cell = span / static_cast<double>(grid);
  const double cell_area = cell.x() * cell.y();
  const double near_radius = 2.0 * cell.norm();

  double acc = 0.0;
  for (long iy = 0; iy < grid; ++iy)
    for (long ix = 0; ix < grid; ++ix) {
      const Vec2 base = lo + Vec2(ix * cell.x(), iy * cell.y());
      const Vec2 center = base + 0.5 * cell;
      if ((center - x).norm() <= near_radius) continue;  // handled below
      const Vec2 j(unif(rng), unif(rng));
      const Vec2 p = base + Vec2(j.x() * cell.x(), j.y() * cell.y());
      const Vec2 q =
          base + Vec2((1.0 - j.x()) * cell.x(), (1.0 - j.y()) * cell.y());
      if (shape_contains(E, p)) acc += 0.5 * cell_area * std::pow((p - x).norm(), -alpha);
      if (shape_contains(E, q)) acc += 0.5 * cell_area * std::pow((q - x).norm(), -alpha);
    }

  // Deterministic midpoint refinement of the near-singular cells; the
  // innermost ring integrates in polar coordinates around x.
  for (long iy = 0; iy < grid; ++iy)
    for (long ix = 0; ix < grid; ++ix) {
      const Vec2 base = lo + Vec2(ix * cell.x(), iy * cell.y());
      const Vec2 center = base + 0.5 * cell;
      if ((center - x).norm() > near_radius) continue;
      const int sub = 64;
      for (int sy = 0; sy < sub; ++sy)
        for (int sx = 0; sx < sub; ++sx) {
          const Vec2 p = base + Vec2((sx + 0.5) * cell.x() / sub,
                                     (sy + 0.5) * cell.y() / sub);
          const double r = (p - x).norm();
          if (!shape_contains(E, p)) continue;
          const double sub_area = cell_area / (sub * sub);
          const double h = std::max(cell.x(), cell.y()) / sub;
          if (r < 0.5 * h) {
            // Polar integral over the disk of equal area around x.
            const double req = std::sqrt(sub_area / M_PI);
            acc += 2.0 * M_PI * std::pow(req, 2.0 - alpha) / (2.0 - alpha);
          } else {
            acc += sub_area * std::pow(r, -alpha);
          }
        }
    }
  return acc;
}

double mc_interaction(const Shape& E, double alpha, long samples,
                      std::uint64_t seed) {
  auto [lo, hi] = bounding_box(E);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vec2 span = hi - lo;
  const double box_area = span.x() * span.y();
  const long n_outer = std::max(8L, static_cast<long>(std::sqrt(samples / 2.0)));
  const long g = std::max(2L, static_cast<long>(std::sqrt(double(n_outer))));
  const Vec2 cell = span / static_cast<double>(g);

  double acc = 0.0;
  long pairs = 0;
  for (long oy = 0; oy < g; ++oy)
    for (long ox = 0; ox < g; ++ox) {
      const Vec2 xb = lo + Vec2(ox * cell.x(), oy * cell.y());
      const Vec2 xj(unif(rng), unif(rng));
      const Vec2 x = xb + Vec2(xj.x() * cell.x(), xj.y() * cell.y());
      const bool x_in = shape_contains(E, x);
      for (long iy = 0; iy < g; ++iy)
        for (long ix = 0; ix < g; ++ix) {
          const Vec2 yb = lo + Vec2(ix * cell.x(), iy * cell.y());
          const Vec2 yj(unif(rng), unif(rng));
          const Vec2 y = yb + Vec2(yj.x() * cell.x(), yj.y() * cell.y());
          const Vec2 y2 = yb + Vec2((1.0 - yj.x()) * cell.x(),
                                    (1.0 - yj.y()) * cell.y());
          pairs += 2;
          if (!x_in) continue;
          if (shape_contains(E, y)) {
            const double r = (x - y).norm();
            if (r > 0.0) acc += std::pow(r, -alpha);
          }
          if (shape_contains(E, y2)) {
            const double r = (x - y2).norm();
            if (r > 0.0) acc += std::pow(r, -alpha);
          }
        }
    }
  return box_area * box_area * acc / static_cast<double>(pairs);
}

double dense_dual(const SurfaceTension& f, const Vec2& x, int grid) {
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double th = 2.0 * M_PI * i / grid;
    const Vec2 u(std::cos(th), std::sin(th));
    best = std::max(best, x.dot(u) / eval_tension(f, u));
  }
  return best;
}

std::pair<double, double> dense_tension_range(const SurfaceTension& f,
                                              int grid) {
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double th = 2.0 * M_PI * i / grid;
    const double v = eval_tension(f, Vec2(std::cos(th), std::sin(th)));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace anisodrop::oracle
