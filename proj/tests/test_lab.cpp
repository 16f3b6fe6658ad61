#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "anisodrop/lab.hpp"

using namespace anisodrop;

TEST_CASE("tension and shape JSON round trips") {
  MatX A(2, 2);
  A << 1.0, 0.2, 0.2, 2.0;
  const SurfaceTension f = SurfaceTension::quadratic(A);
  const SurfaceTension f2 = tension_from_json(tension_to_json(f));
  CHECK(eval_tension(f2, Vec2(0.3, -0.7)) ==
        doctest::Approx(eval_tension(f, Vec2(0.3, -0.7))).epsilon(1e-15));

  VecX sides(2);
  sides << 1.5, 2.5;
  const Shape box = make_box(sides);
  const Shape box2 = shape_from_json(shape_to_json(box));
  CHECK(volume(box2) == doctest::Approx(volume(box)).epsilon(1e-15));

  const Shape ball = make_ball(2, VecX(Vec2(0.1, -0.2)), 0.8);
  CHECK(volume(shape_from_json(shape_to_json(ball))) ==
        doctest::Approx(volume(ball)).epsilon(1e-15));

  const Shape tri = make_polygon(
      std::vector<Vec2>{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  CHECK(volume(shape_from_json(shape_to_json(tri))) ==
        doctest::Approx(0.5).epsilon(1e-15));

  const WulffShape K = build_wulff(SurfaceTension::euclidean(2), 64);
  const Shape star = make_star(K, VecX::Constant(64, 0.1));
  const Shape star2 = shape_from_json(shape_to_json(star));
  CHECK(volume(star2) == doctest::Approx(volume(star)).epsilon(1e-14));

  const GridMask g = rasterize(box, 0.25);
  const Shape g2 = shape_from_json(shape_to_json(Shape{g}));
  CHECK(volume(g2) == doctest::Approx(volume(Shape{g})).epsilon(1e-15));
}

TEST_CASE("unknown fields are rejected") {
  Json j;
  j["variant"] = "box";
  j["sides"] = Json::array({1.0, 1.0});
  j["bogus"] = 1;
  CHECK_THROWS_AS(shape_from_json(j), std::invalid_argument);

  Json cfg;
  cfg["name"] = "crystal-min";
  cfg["unexpected"] = true;
  CHECK_THROWS_AS(experiment_config_from_json(cfg), std::invalid_argument);

  Json q;
  q["rel_tol"] = -1.0;
  CHECK_THROWS_AS(quadrature_from_json(q), std::invalid_argument);
}

TEST_CASE("csv formatting is locale-free with CRLF rows") {
  CsvTable t({"a", "b"});
  t.add_row_doubles({0.5, 1.0 / 3.0});
  const std::string s = t.to_string("hash=deadbeef");
  CHECK(s.find("# hash=deadbeef\r\n") == 0);
  CHECK(s.find("0.3333333333333333") != std::string::npos);
  CHECK(s.find(',') != std::string::npos);
  CHECK(s.find(';') == std::string::npos);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -2.5e300}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("verify: slicing suite passes") {
  QuadratureSpec spec;
  const auto reports = run_verify({"slicing"}, spec);
  REQUIRE(reports.size() == 1);
  for (const auto& c : reports[0].checks) {
    INFO(c.name, " margin=", c.margin);
    CHECK(c.pass);
  }
}

TEST_CASE("experiment: crystal-min writes artifacts and passes") {
  const std::string dir = "test_out_crystal";
  std::filesystem::remove_all(dir);
  Json j;
  j["name"] = "crystal-min";
  j["sweep"] = Json::array({1e-3});
  j["out_dir"] = dir;
  ExperimentConfig cfg = experiment_config_from_json(j);
  cfg.out_dir = dir;
  const int code = run_experiment(cfg);
  CHECK(code == 0);
  CHECK(std::filesystem::exists(dir + "/crystal-min.csv"));
  CHECK(std::filesystem::exists(dir + "/crystal-min_summary.json"));
  CHECK(std::filesystem::exists(dir + "/crystal-min_manifest.json"));
  const Json manifest =
      Json::parse(read_file(dir + "/crystal-min_manifest.json"));
  CHECK(manifest.at("config_hash").get<std::string>() ==
        hex64(cfg.config_hash));
  CHECK(manifest.at("artifacts").size() == 2);
  // The CSV embeds the same hash.
  const std::string csv = read_file(dir + "/crystal-min.csv");
  CHECK(csv.find(hex64(cfg.config_hash)) != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("family parsing") {
  Json fam;
  fam["variant"] = "box";
  fam["n"] = 3;
  const ShapeFamily f = family_from_json(fam, Json::object());
  CHECK(std::holds_alternative<BoxFamily>(f));

  Json bad;
  bad["variant"] = "box";
  bad["wat"] = 1;
  CHECK_THROWS_AS(family_from_json(bad, Json::object()),
                  std::invalid_argument);
}
