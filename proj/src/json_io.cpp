#include "anisodrop/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace anisodrop {

namespace {

Json vec_to_json(const VecX& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VecX vec_from_json(const Json& j) {
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

void reject_unknown_fields(const Json& j,
                           const std::vector<std::string>& allowed,
                           const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
  }
}

Json tension_to_json(const SurfaceTension& f) {
  Json j;
  switch (f.kind()) {
    case TensionKind::Euclidean:
      j["variant"] = "euclidean";
      j["dim"] = f.dim();
      break;
    case TensionKind::Quadratic: {
      j["variant"] = "quadratic";
      j["dim"] = f.dim();
      Json m = Json::array();
      for (int r = 0; r < f.dim(); ++r)
        for (int c = 0; c < f.dim(); ++c) m.push_back(f.matrix()(r, c));
      j["matrix"] = m;
      break;
    }
    case TensionKind::Crystalline: {
      j["variant"] = "crystalline";
      j["dim"] = f.dim();
      Json pts = Json::array();
      for (const auto& p : f.points()) pts.push_back(vec_to_json(p));
      j["points"] = pts;
      break;
    }
    case TensionKind::Perturbed2D: {
      j["variant"] = "perturbed";
      j["delta"] = f.delta();
      Json h = Json::array();
      for (const auto& [k, c] : f.harmonics()) h.push_back(Json::array({k, c}));
      j["harmonics"] = h;
      break;
    }
  }
  return j;
}

SurfaceTension tension_from_json(const Json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "euclidean") {
    reject_unknown_fields(j, {"variant", "dim"}, "tension");
    return SurfaceTension::euclidean(j.value("dim", 2));
  }
  if (variant == "quadratic") {
    reject_unknown_fields(j, {"variant", "dim", "matrix"}, "tension");
    const int n = j.value("dim", 2);
    const auto& m = j.at("matrix");
    if (static_cast<int>(m.size()) != n * n)
      throw std::invalid_argument("tension: matrix needs dim^2 entries");
    MatX A(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A(r, c) = m[r * n + c].get<double>();
    return SurfaceTension::quadratic(A);
  }
  if (variant == "crystalline") {
    reject_unknown_fields(j, {"variant", "dim", "points"}, "tension");
    std::vector<VecX> pts;
    for (const auto& p : j.at("points")) pts.push_back(vec_from_json(p));
    return SurfaceTension::crystalline(pts);
  }
  if (variant == "perturbed") {
    reject_unknown_fields(j, {"variant", "delta", "harmonics"}, "tension");
    std::vector<std::pair<int, double>> h;
    for (const auto& e : j.at("harmonics"))
      h.emplace_back(e[0].get<int>(), e[1].get<double>());
    return SurfaceTension::perturbed2d(j.at("delta").get<double>(), h);
  }
  throw std::invalid_argument("tension: unknown variant '" + variant + "'");
}

Json shape_to_json(const Shape& E) {
  return std::visit(
      [](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        Json j;
        if constexpr (std::is_same_v<T, Polygon2D>) {
          j["variant"] = "polygon";
          if (e.loops.size() == 1) {
            Json v = Json::array();
            for (const auto& p : e.loops[0])
              v.push_back(Json::array({p.x(), p.y()}));
            j["vertices"] = v;
          } else {
            Json loops = Json::array();
            for (const auto& loop : e.loops) {
              Json v = Json::array();
              for (const auto& p : loop)
                v.push_back(Json::array({p.x(), p.y()}));
              loops.push_back(v);
            }
            j["loops"] = loops;
          }
        } else if constexpr (std::is_same_v<T, StarDomain>) {
          j["variant"] = "star";
          j["tension"] = tension_to_json(e.base.tension);
          j["samples"] = e.base.sample_count();
          j["u"] = vec_to_json(e.offsets);
        } else if constexpr (std::is_same_v<T, Box>) {
          j["variant"] = "box";
          j["sides"] = vec_to_json(e.sides);
        } else if constexpr (std::is_same_v<T, Ball>) {
          j["variant"] = "ball";
          j["dim"] = e.dim;
          j["center"] = vec_to_json(e.center);
          j["radius"] = e.radius;
        } else {
          j["variant"] = "gridmask";
          j["cell"] = e.cell;
          j["origin"] = Json::array({e.origin.x(), e.origin.y()});
          j["nx"] = e.nx;
          j["ny"] = e.ny;
          std::string bits(e.mask.size(), '0');
          for (std::size_t i = 0; i < e.mask.size(); ++i)
            if (e.mask[i]) bits[i] = '1';
          j["mask"] = bits;
        }
        return j;
      },
      E);
}

Shape shape_from_json(const Json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "polygon") {
    reject_unknown_fields(j, {"variant", "vertices", "loops"}, "shape");
    std::vector<std::vector<Vec2>> loops;
    auto parse_loop = [](const Json& v) {
      std::vector<Vec2> loop;
      for (const auto& p : v)
        loop.emplace_back(p[0].get<double>(), p[1].get<double>());
      return loop;
    };
    if (j.contains("vertices")) {
      loops.push_back(parse_loop(j["vertices"]));
    } else {
      for (const auto& l : j.at("loops")) loops.push_back(parse_loop(l));
    }
    return make_polygon(std::move(loops));
  }
  if (variant == "star") {
    reject_unknown_fields(j, {"variant", "tension", "samples", "u"}, "shape");
    const SurfaceTension f = tension_from_json(j.at("tension"));
    const WulffShape K = build_wulff(f, j.at("samples").get<int>());
    return make_star(K, vec_from_json(j.at("u")));
  }
  if (variant == "box") {
    reject_unknown_fields(j, {"variant", "sides"}, "shape");
    return make_box(vec_from_json(j.at("sides")));
  }
  if (variant == "ball") {
    reject_unknown_fields(j, {"variant", "dim", "center", "radius"}, "shape");
    const int dim = j.value("dim", 2);
    VecX center = j.contains("center") ? vec_from_json(j["center"])
                                       : VecX(VecX::Zero(dim));
    return make_ball(dim, std::move(center), j.at("radius").get<double>());
  }
  if (variant == "gridmask") {
    reject_unknown_fields(j, {"variant", "cell", "origin", "nx", "ny", "mask"},
                          "shape");
    GridMask g;
    g.cell = j.at("cell").get<double>();
    g.origin = Vec2(j.at("origin")[0].get<double>(),
                    j.at("origin")[1].get<double>());
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    const std::string bits = j.at("mask").get<std::string>();
    g.mask.assign(bits.size(), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) g.mask[i] = bits[i] == '1';
    return make_grid_mask(std::move(g));
  }
  throw std::invalid_argument("shape: unknown variant '" + variant + "'");
}

Json wulff_to_json(const WulffShape& K) {
  Json j;
  j["tension"] = tension_to_json(K.tension);
  j["volume"] = K.volume;
  j["ell"] = K.ell;
  j["ell_cap"] = K.ell_cap;
  j["perimeter_f"] = wulff_perimeter(K);
  j["sample_count"] = K.sample_count();
  if (!K.polygon_vertices.empty()) {
    Json v = Json::array();
    for (const auto& p : K.polygon_vertices)
      v.push_back(Json::array({p.x(), p.y()}));
    j["polygon_vertices"] = v;
  }
  return j;
}

std::string wulff_boundary_csv(const WulffShape& K, const std::string& header) {
  CsvTable t({"x", "y", "nu_x", "nu_y", "w"});
  for (int i = 0; i < K.sample_count(); ++i)
    t.add_row_doubles({K.points(0, i), K.points(1, i), K.normals(0, i),
                       K.normals(1, i), K.weights(i)});
  return t.to_string(header);
}

Json breakdown_to_json(const EnergyBreakdown& b) {
  Json j;
  j["perimeter"] = b.perimeter;
  j["nonlocal"] = b.nonlocal;
  j["weight"] = b.weight;
  j["total"] = b.total;
  j["error_estimate"] = b.error;
  j["rescaled"] = b.rescaled;
  return j;
}

Json params_to_json(const EnergyParams& p) {
  Json j;
  j["n"] = p.n;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  if (p.mass_given)
    j["mass"] = p.mass;
  else
    j["epsilon"] = p.epsilon;
  if (p.confinement_radius) j["confinement_radius"] = *p.confinement_radius;
  return j;
}

EnergyParams params_from_json(const Json& j) {
  reject_unknown_fields(
      j, {"n", "alpha", "beta", "mass", "epsilon", "confinement_radius"},
      "params");
  const int n = j.value("n", 2);
  const double alpha = j.value("alpha", 1.0);
  if (j.contains("mass") && j.contains("epsilon"))
    throw std::invalid_argument("params: give exactly one of mass, epsilon");
  EnergyParams p = j.contains("mass")
                       ? EnergyParams::from_mass(n, alpha, j["mass"].get<double>())
                       : EnergyParams::from_epsilon(
                             n, alpha, j.value("epsilon", 1.0));
  p.beta = j.value("beta", 1.0);
  if (j.contains("confinement_radius"))
    p.confinement_radius = j["confinement_radius"].get<double>();
  return p;
}

Json quadrature_to_json(const QuadratureSpec& s) {
  Json j;
  j["angular_order"] = s.angular_order;
  j["outer_order"] = s.outer_order;
  j["rel_tol"] = s.rel_tol;
  j["mc_samples"] = s.mc_samples;
  j["seed"] = s.seed;
  j["adaptive_fan"] = s.adaptive_fan;
  return j;
}

QuadratureSpec quadrature_from_json(const Json& j) {
  reject_unknown_fields(j,
                        {"angular_order", "outer_order", "rel_tol",
                         "mc_samples", "seed", "adaptive_fan"},
                        "quadrature");
  QuadratureSpec s;
  s.angular_order = j.value("angular_order", s.angular_order);
  s.outer_order = j.value("outer_order", s.outer_order);
  s.rel_tol = j.value("rel_tol", s.rel_tol);
  s.mc_samples = j.value("mc_samples", s.mc_samples);
  s.seed = j.value("seed", s.seed);
  s.adaptive_fan = j.value("adaptive_fan", s.adaptive_fan);
  if (s.rel_tol <= 0.0)
    throw std::invalid_argument("quadrature: rel_tol must be positive");
  return s;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("CsvTable: column count mismatch");
  rows_.push_back(cells);
}

void CsvTable::add_row_doubles(const std::vector<double>& cells) {
  std::vector<std::string> out;
  out.reserve(cells.size());
  for (double c : cells) out.push_back(format_double(c));
  add_row(out);
}

std::string CsvTable::to_string(const std::string& comment) const {
  std::ostringstream os;
  if (!comment.empty()) os << "# " << comment << "\r\n";
  for (std::size_t i = 0; i < columns_.size(); ++i)
    os << (i ? "," : "") << columns_[i];
  os << "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\r\n";
  }
  return os.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace anisodrop
