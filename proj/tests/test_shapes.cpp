#include <doctest.h>

#include <cmath>
#include <random>

#include "anisodrop/lab.hpp"
#include "anisodrop/shapes.hpp"

using namespace anisodrop;

namespace {

SurfaceTension half_l1() {
  return SurfaceTension::crystalline({VecX(Vec2(0.5, 0.5)), VecX(Vec2(0.5, -0.5)),
                                      VecX(Vec2(-0.5, 0.5)),
                                      VecX(Vec2(-0.5, -0.5))});
}

Shape unit_square() {
  VecX sides(2);
  sides << 1.0, 1.0;
  return make_box(sides);
}

Shape rectangle_Ra(double a) {
  VecX sides(2);
  sides << a, 1.0 / a;
  return make_box(sides);
}

}  // namespace

TEST_CASE("volume: boxes, rectangles, star domains") {
  CHECK(volume(unit_square()) == 1.0);
  for (double a : {0.3, 0.8, 1.0, 1.7, 2.5})
    CHECK(volume(rectangle_Ra(a)) == doctest::Approx(1.0).epsilon(1e-15));

  const WulffShape disk = build_wulff(SurfaceTension::euclidean(2), 512);
  const Shape star = make_star(disk, VecX::Constant(512, 0.25));
  CHECK(std::abs(volume(star) - M_PI * 1.25 * 1.25) <= 1e-6);
}

TEST_CASE("aniso_perimeter examples") {
  const SurfaceTension f = half_l1();
  CHECK(aniso_perimeter(unit_square(), f) == doctest::Approx(2.0).epsilon(4e-16));
  for (double a : {0.4, 1.0, 1.9}) {
    const double p = aniso_perimeter(rectangle_Ra(a), f);
    CHECK(p == doctest::Approx(a + 1.0 / a).epsilon(4e-16));
  }
  const Shape disk_poly{as_polygon(make_ball(2, VecX::Zero(2), 1.0), 512)};
  CHECK(std::abs(aniso_perimeter(disk_poly, SurfaceTension::euclidean(2)) -
                 2.0 * M_PI) <= 1e-3);
  CHECK_THROWS_AS(aniso_perimeter(Shape{rasterize(unit_square(), 0.1)}, f),
                  UnsupportedError);
}

TEST_CASE("barycenter") {
  CHECK(barycenter(rectangle_Ra(1.7)).norm() == 0.0);
  const Shape tri = make_polygon(
      std::vector<Vec2>{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  CHECK((barycenter(tri) - VecX(Vec2(1.0 / 3, 1.0 / 3))).norm() <= 1e-15);

  // Star with u = 0.1 cos(theta) against a 10x resolution run.
  auto star_bary = [](int M) {
    const WulffShape disk = build_wulff(SurfaceTension::euclidean(2), M);
    VecX u(M);
    for (int i = 0; i < M; ++i) {
      const double th = std::atan2(disk.normals(1, i), disk.normals(0, i));
      u(i) = 0.1 * std::cos(th);
    }
    return barycenter(make_star(disk, u));
  };
  const VecX coarse = star_bary(256), fine = star_bary(2560);
  CHECK((coarse - fine).norm() <= 1e-8);
  CHECK(std::abs(coarse(1)) <= 1e-10);
  CHECK(coarse(0) > 0.04);  // shifted toward +x
}

TEST_CASE("rescale_to_volume") {
  const Shape big = rescale_to_volume(unit_square(), 4.0);
  CHECK(std::get<Box>(big).sides(0) == doctest::Approx(2.0).epsilon(1e-15));
  const Shape ball = rescale_to_volume(make_ball(2, VecX::Zero(2), 1.0),
                                       M_PI / 4.0);
  CHECK(std::get<Ball>(ball).radius == doctest::Approx(0.5).epsilon(1e-15));
  const Shape tri = make_polygon(
      std::vector<Vec2>{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  const Shape same = rescale_to_volume(tri, volume(tri));
  CHECK(volume(same) == doctest::Approx(volume(tri)).epsilon(1e-13));
  // barycenter commutes with the dilation
  const Shape scaled = rescale_to_volume(tri, 2.0);
  const double r = std::sqrt(2.0 / volume(tri));
  CHECK((barycenter(scaled) - r * barycenter(tri)).norm() <= 1e-12);
}

TEST_CASE("slice: square, degenerate, identity") {
  const SurfaceTension f = half_l1();
  const auto res = slice(unit_square(), SlicingPlane{Vec2(1.0, 0.0), 0.0});
  CHECK(res.cut_measure == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(volume(res.plus) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(volume(res.minus) == doctest::Approx(0.5).epsilon(1e-14));
  const double gain = aniso_perimeter(res.plus, f) +
                      aniso_perimeter(res.minus, f) -
                      aniso_perimeter(unit_square(), f);
  CHECK(gain == doctest::Approx(1.0).epsilon(1e-13));

  // Plane missing the shape entirely.
  const Shape tri = make_polygon(
      std::vector<Vec2>{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  const auto miss = slice(tri, SlicingPlane{Vec2(0.0, 1.0), 5.0});
  CHECK(miss.cut_measure == 0.0);
  CHECK(std::get<Polygon2D>(miss.plus).empty());
  CHECK(volume(miss.minus) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("slice: non-convex split into two components") {
  // U-shape: cutting across the opening yields two plus components.
  std::vector<Vec2> u_shape = {Vec2(0, 0),    Vec2(3, 0),   Vec2(3, 2),
                               Vec2(2, 2),    Vec2(2, 0.5), Vec2(1, 0.5),
                               Vec2(1, 2),    Vec2(0, 2)};
  const Shape E = make_polygon(u_shape);
  const auto res = slice(E, SlicingPlane{Vec2(0.0, 1.0), 1.0});
  const Polygon2D& plus = std::get<Polygon2D>(res.plus);
  CHECK(plus.loops.size() == 2);
  CHECK(volume(res.plus) + volume(res.minus) ==
        doctest::Approx(volume(E)).epsilon(1e-14));
  const SurfaceTension f = half_l1();
  const double lhs = aniso_perimeter(res.plus, f) +
                     aniso_perimeter(res.minus, f) - aniso_perimeter(E, f);
  const double rhs = (eval_tension(f, Vec2(0.0, 1.0)) +
                      eval_tension(f, Vec2(0.0, -1.0))) *
                     res.cut_measure;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("slice identity on random convex polygons") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> off(-0.3, 0.3), ang(0.0, 2 * M_PI);
  const SurfaceTension f = half_l1();
  for (int t = 0; t < 20; ++t) {
    const Polygon2D P = random_convex_polygon(rng, 9, 1.0);
    const Shape E{P};
    const double th = ang(rng);
    const Vec2 nu(std::cos(th), std::sin(th));
    const auto res = slice(E, SlicingPlane{nu, off(rng)});
    const double vol_gap =
        std::abs(volume(res.plus) + volume(res.minus) - volume(E));
    CHECK(vol_gap <= 1e-12);
    const double lhs = aniso_perimeter(res.plus, f) +
                       aniso_perimeter(res.minus, f) - aniso_perimeter(E, f);
    const double rhs =
        (eval_tension(f, nu) + eval_tension(f, Vec2(-nu))) * res.cut_measure;
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("hausdorff distance") {
  const Shape d1 = make_ball(2, VecX::Zero(2), 1.0);
  CHECK(hausdorff_boundary_distance(d1, d1) == 0.0);
  const Shape d2 = make_ball(2, VecX::Zero(2), 1.1);
  CHECK(hausdorff_boundary_distance(d1, d2) ==
        doctest::Approx(0.1).epsilon(2e-2));
  const Shape s1 = unit_square();
  const Shape s2 = rescale_to_volume(unit_square(), 1.44);
  CHECK(hausdorff_boundary_distance(s1, s2, 2048) ==
        doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(2e-2));
}

TEST_CASE("diameter") {
  CHECK(diameter(unit_square()) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diameter(rectangle_Ra(2.0)) == doctest::Approx(std::sqrt(4.25)));
  CHECK(diameter(make_ball(2, VecX::Zero(2), 0.7)) == doctest::Approx(1.4));
}

TEST_CASE("star norms") {
  const int M = 1024;
  const WulffShape disk = build_wulff(SurfaceTension::euclidean(2), M);
  {
    const StarDomain s{disk, VecX::Zero(M)};
    const auto n = star_norms(s);
    CHECK(n.linf == 0.0);
    CHECK(n.c1_seminorm == 0.0);
    CHECK(n.h1 == 0.0);
  }
  {
    const double c = 0.07;
    const StarDomain s{disk, VecX::Constant(M, c)};
    const auto n = star_norms(s);
    CHECK(n.linf == doctest::Approx(c));
    CHECK(n.c1_seminorm <= 1e-12);
    CHECK(n.h1 == doctest::Approx(c * std::sqrt(2.0 * M_PI)).epsilon(1e-6));
  }
  {
    const double delta = 0.05;
    VecX u(M);
    for (int i = 0; i < M; ++i) {
      const double th = std::atan2(disk.normals(1, i), disk.normals(0, i));
      u(i) = delta * std::cos(th);
    }
    const auto n = star_norms(StarDomain{disk, u});
    CHECK(n.h1 * n.h1 ==
          doctest::Approx(2.0 * M_PI * delta * delta).epsilon(1e-5));
  }
  // Graph condition ||u||_inf < ell/2 enforced at construction.
  CHECK_THROWS_AS(make_star(disk, VecX::Constant(M, 0.6)),
                  std::invalid_argument);
}

TEST_CASE("perimeter scaling is exact for polygons") {
  std::mt19937_64 rng(5);
  const SurfaceTension f = half_l1();
  for (int t = 0; t < 5; ++t) {
    const Polygon2D P = random_convex_polygon(rng, 8, 1.0);
    Polygon2D scaled = P;
    for (auto& loop : scaled.loops)
      for (auto& v : loop) v *= 3.0;
    CHECK(aniso_perimeter(Shape{scaled}, f) ==
          doctest::Approx(3.0 * aniso_perimeter(Shape{P}, f)).epsilon(1e-13));
  }
}

TEST_CASE("triangulation covers the polygon") {
  std::vector<Vec2> u_shape = {Vec2(0, 0),    Vec2(3, 0),   Vec2(3, 2),
                               Vec2(2, 2),    Vec2(2, 0.5), Vec2(1, 0.5),
                               Vec2(1, 2),    Vec2(0, 2)};
  const Polygon2D P = std::get<Polygon2D>(make_polygon(u_shape));
  double sum = 0.0;
  for (const auto& t : triangulate(P))
    sum += 0.5 * cross2(t[1] - t[0], t[2] - t[0]);
  CHECK(sum == doctest::Approx(polygon_area(P)).epsilon(1e-13));
}

TEST_CASE("symmetric difference of shifted squares") {
  std::vector<Vec2> sq1 = {Vec2(-0.5, -0.5), Vec2(0.5, -0.5), Vec2(0.5, 0.5),
                           Vec2(-0.5, 0.5)};
  std::vector<Vec2> sq2 = sq1;
  for (auto& v : sq2) v += Vec2(0.1, 0.0);
  CHECK(symmetric_difference_area(make_polygon(sq1), make_polygon(sq2)) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(symmetric_difference_area(make_polygon(sq1), make_polygon(sq1)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(
      make_polygon(std::vector<Vec2>{Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}),
      std::invalid_argument);  // CW
  CHECK_THROWS_AS(make_polygon(std::vector<Vec2>{Vec2(0, 0), Vec2(1, 1),
                                                 Vec2(1, 0), Vec2(0, 1)}),
                  std::invalid_argument);  // self-intersecting
  GridMask g;
  g.cell = 0.1;
  g.nx = g.ny = 2;
  g.mask = {0, 0, 0, 0};
  CHECK_THROWS_AS(make_grid_mask(g), std::invalid_argument);
}
