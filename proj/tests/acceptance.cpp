// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
// Usage: anisodrop_acceptance [path-to-anisodrop-cli]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "anisodrop/lab.hpp"
#include "oracles.hpp"

using namespace anisodrop;

namespace {

// Thresholds that the statements leave to oracle runs; measured with the
// Monte Carlo / refined-grid oracles in this repository and pinned at half
// the observed values (see tests/oracles.cpp for the oracle paths).
constexpr double kC7AnisoResidualMin = 0.065;       // measured 0.131
const std::map<double, double> kC8EllipseMin = {
    {0.5, 0.12}, {1.0, 0.25}, {1.5, 0.52}};         // measured 0.24/0.51/1.05
const std::map<double, double> kC8SquareMin = {
    {0.5, 0.035}, {1.0, 0.10}, {1.5, 0.31}};        // measured 0.07/0.21/0.63

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Outcome> g_results;

void record(int id, const std::string& name, bool pass,
            const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
}

void run(int id, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [pass, detail] = body();
    record(id, name, pass, detail);
  } catch (const std::exception& e) {
    record(id, name, false, std::string("exception: ") + e.what());
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::fprintf(stderr, "  [t] C%02d %.1fs\n", id, dt);
}

SurfaceTension half_l1() {
  return SurfaceTension::crystalline({VecX(Vec2(0.5, 0.5)), VecX(Vec2(0.5, -0.5)),
                                      VecX(Vec2(-0.5, 0.5)),
                                      VecX(Vec2(-0.5, -0.5))});
}

SurfaceTension diag12() {
  MatX A(2, 2);
  A << 1.0, 0.0, 0.0, 2.0;
  return SurfaceTension::quadratic(A);
}

const QuadratureSpec kSpec;

double second_diff_rich(const std::function<double(double)>& f, double x,
                        double h) {
  auto d2 = [&](double hh) {
    return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh);
  };
  return (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
}

std::pair<bool, std::string> c1_ball_potential() {
  const std::vector<std::pair<double, double>> cases = {
      {1.0, 0.5}, {2.0, 1.0}, {0.5, 1.5}, {1.3, 0.8}};
  double worst = 0.0;
  for (const auto& [r, alpha] : cases) {
    const double closed = 2.0 * M_PI / (2.0 - alpha) * std::pow(r, 2.0 - alpha);
    const Shape ball = make_ball(2, VecX::Zero(2), r);
    const double v = riesz_potential(ball, VecX(Vec2(0, 0)), alpha, kSpec);
    worst = std::max(worst, std::abs(v - closed) / closed);
    // Independent route: the radial fan over a dense polygonization.
    const double vp = riesz_potential(Shape{as_polygon(ball, 2048)},
                                      VecX(Vec2(0, 0)), alpha, kSpec);
    worst = std::max(worst, std::abs(vp - closed) / closed);
  }
  return {worst <= 1e-3, "max rel err " + format_double(worst)};
}

std::pair<bool, std::string> c2_crystal_perimeter() {
  const SurfaceTension f = half_l1();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.3 + 0.12 * i;
    VecX sides(2);
    sides << a, 1.0 / a;
    const double p = aniso_perimeter(make_box(sides), f);
    const double want = a + 1.0 / a;
    worst = std::max(worst, std::abs(p - want) / want);
  }
  VecX unit(2);
  unit << 1.0, 1.0;
  const double psq = aniso_perimeter(make_box(unit), f);
  worst = std::max(worst, std::abs(psq - 2.0) / 2.0);
  return {worst <= 1e-14, "max rel err " + format_double(worst)};
}

std::pair<bool, std::string> c3_rectangle_criticality() {
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 1.5}) {
    auto v = [alpha](double a) {
      VecX sides(2);
      sides << a, 1.0 / a;
      return box_interaction(sides, alpha, 24).value;
    };
    const double h = 1e-3;
    worst = std::max(worst, std::abs((v(1.0 + h) - v(1.0 - h)) / (2.0 * h)));
  }
  return {worst <= 1e-4, "max |dV/da| " + format_double(worst)};
}

std::pair<bool, std::string> c4_second_variation() {
  const double alpha = 1.0;
  std::vector<double> cs;
  double d2_smallest = 0.0;
  for (double eps : {1e-3, 1e-2, 1e-1}) {
    auto energy = [&](double a) {
      return rectangle_energy(a, alpha, eps, kSpec);
    };
    const double d2 = second_diff_rich(energy, 1.0, 1e-3);
    if (eps == 1e-3) d2_smallest = d2;
    cs.push_back((2.0 - d2) / eps);
  }
  double dev = 0.0;
  for (double c : cs)
    dev = std::max(dev, std::abs(c - cs[0]) / std::abs(cs[0]));
  const bool pass = dev <= 0.02 && d2_smallest > 0.5;
  return {pass, "C(alpha) spread " + format_double(dev) + ", d2(1e-3) = " +
                    format_double(d2_smallest)};
}

std::pair<bool, std::string> c5_crystal_minimality() {
  double worst = 0.0;
  for (double eps : {1e-3, 1e-2}) {
    const EnergyParams p = EnergyParams::from_epsilon(2, 1.0, eps);
    const auto rep = minimize_1d(RectangleFamily{0.5, 2.0}, p, kSpec);
    if (!rep.converged) return {false, "golden section did not converge"};
    worst = std::max(worst, std::abs(rep.best_params(0) - 1.0));
  }
  return {worst <= 1e-3, "max |a*-1| " + format_double(worst)};
}

std::pair<bool, std::string> c6_box_minimality() {
  const EnergyParams p = EnergyParams::from_epsilon(3, 1.0, 1e-3);
  const auto rep = minimize_nd(ShapeFamily{BoxFamily{3, 0.5, 2.0}}, p, kSpec);
  const double dev = (rep.best_params - VecX::Ones(2)).cwiseAbs().maxCoeff();
  return {dev <= 5e-3, "max |s-1| " + format_double(dev)};
}

std::pair<bool, std::string> c7_wulff_noncritical() {
  const EnergyParams p = EnergyParams::from_epsilon(2, 1.0, 0.1);
  const WulffShape K = build_wulff(diag12(), 1024);
  const auto rep_k =
      el_residual(make_star(K, VecX::Zero(1024)), diag12(), p, kSpec, 512);
  const Shape disk = make_ball(2, VecX::Zero(2), 1.0);
  const auto rep_d =
      el_residual(disk, SurfaceTension::euclidean(2), p, kSpec, 512);
  const bool pass =
      rep_k.residual >= kC7AnisoResidualMin && rep_d.residual <= 2e-3;
  return {pass, "K residual " + format_double(rep_k.residual) +
                    " (>= " + format_double(kC7AnisoResidualMin) +
                    "), disk residual " + format_double(rep_d.residual)};
}

std::pair<bool, std::string> c8_riesz_constancy() {
  Polygon2D ell;
  ell.loops.emplace_back();
  for (int i = 0; i < 1024; ++i) {
    const double th = 2.0 * M_PI * i / 1024;
    ell.loops.back().emplace_back(std::cos(th), 2.0 * std::sin(th));
  }
  VecX unit(2);
  unit << 1.0, 1.0;
  const Shape square = make_box(unit);
  const Shape ball = make_ball(2, VecX::Zero(2), 1.0);
  std::string detail;
  bool pass = true;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto rb = potential_constancy_residual(ball, alpha, kSpec, 256);
    const auto re = potential_constancy_residual(Shape{ell}, alpha, kSpec, 256);
    const auto rs = potential_constancy_residual(square, alpha, kSpec, 256);
    pass &= rb.residual <= 1e-3;
    pass &= re.residual >= kC8EllipseMin.at(alpha);
    pass &= rs.residual >= kC8SquareMin.at(alpha);
    detail += "a=" + format_double(alpha) + ": ball " +
              format_double(rb.residual) + ", ellipse " +
              format_double(re.residual) + ", square " +
              format_double(rs.residual) + "; ";
  }
  return {pass, detail};
}

std::pair<bool, std::string> c9_scaling_suite() {
  std::mt19937_64 rng(901);
  const SurfaceTension f = half_l1();
  const double alpha = 1.0;
  double worst_v = 0.0, worst_p = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Polygon2D P = random_convex_polygon(rng, 8 + (t % 5), 1.0);
    const double v = interaction_energy(Shape{P}, alpha, kSpec).value;
    const double pf = aniso_perimeter(Shape{P}, f);
    for (double r : {0.5, 2.0}) {
      Polygon2D S = P;
      for (auto& loop : S.loops)
        for (auto& vert : loop) vert *= r;
      const double vr = interaction_energy(Shape{S}, alpha, kSpec).value;
      worst_v = std::max(worst_v,
                         std::abs(vr - std::pow(r, 4.0 - alpha) * v) / vr);
      const double pr = aniso_perimeter(Shape{S}, f);
      worst_p = std::max(worst_p, std::abs(pr - r * pf) / pr);
    }
  }
  return {worst_v <= 1e-4 && worst_p <= 1e-12,
          "V rel " + format_double(worst_v) + ", P rel " +
              format_double(worst_p)};
}

std::pair<bool, std::string> c10_slicing() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> off(-0.3, 0.3), ang(0.0, 2 * M_PI);
  const SurfaceTension f = half_l1();
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Polygon2D P = random_convex_polygon(rng, 9, 1.0);
    const double th = ang(rng);
    const Vec2 nu(std::cos(th), std::sin(th));
    const auto res = slice(Shape{P}, SlicingPlane{nu, off(rng)});
    const double lhs = aniso_perimeter(res.plus, f) +
                       aniso_perimeter(res.minus, f) -
                       aniso_perimeter(Shape{P}, f);
    const double rhs =
        (eval_tension(f, nu) + eval_tension(f, Vec2(-nu))) * res.cut_measure;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  bool slack_ok = true;
  double min_slack = 1e300;
  for (double m : {1e-2, 1e-1}) {
    VecX sides(2);
    sides << std::sqrt(m), std::sqrt(m);
    const auto chk = slicing_bound_check(make_box(sides), f, 1.0, kSpec);
    slack_ok &= chk.holds && chk.rhs > chk.lhs;
    min_slack = std::min(min_slack, chk.rhs - chk.lhs);
  }
  return {worst <= 1e-12 && slack_ok,
          "identity gap " + format_double(worst) + ", min slack " +
              format_double(min_slack)};
}

std::pair<bool, std::string> c11_lipschitz() {
  std::mt19937_64 rng(1101);
  double min_margin = 1e300;
  bool pass = true;
  for (int t = 0; t < 20; ++t) {
    const Polygon2D A = random_convex_polygon(rng, 8 + (t % 4), 1.0);
    const Polygon2D B = random_convex_polygon(rng, 8 + ((t + 1) % 4), 1.0);
    const auto res = lipschitz_gap_bound(Shape{A}, Shape{B}, 1.0, kSpec);
    pass &= res.holds;
    min_margin = std::min(min_margin, res.bound - res.gap);
  }
  return {pass, "min margin " + format_double(min_margin)};
}

std::pair<bool, std::string> c12_dual_potentials() {
  const SurfaceTension f = diag12();
  const WulffShape K = build_wulff(f, 512);
  Polygon2D kp;
  kp.loops.emplace_back(K.points.colwise().begin(), K.points.colwise().end());
  const Shape KE{kp};
  const double volK = volume(KE);
  const double alpha = 0.5, beta = 1.0;

  std::string detail;
  bool pass = true;

  // Maximality over 20 same-volume competitors per functional.
  std::mt19937_64 rng(1201);
  const double u1K =
      dual_potential(KE, f, DualPotentialKind::U1, alpha, kSpec).value;
  const double u2K =
      dual_potential(KE, f, DualPotentialKind::U2, beta, kSpec).value;
  const double u3K =
      dual_potential(KE, f, DualPotentialKind::U3, 0.0, kSpec).value;
  int wins = 0;
  for (int t = 0; t < 20; ++t) {
    const Shape E = rescale_to_volume(
        Shape{random_convex_polygon(rng, 9 + (t % 5), 1.0)}, volK);
    const bool w1 =
        u1K > dual_potential(E, f, DualPotentialKind::U1, alpha, kSpec).value;
    const bool w2 =
        u2K > dual_potential(E, f, DualPotentialKind::U2, beta, kSpec).value;
    const bool w3 =
        u3K > dual_potential(E, f, DualPotentialKind::U3, 0.0, kSpec).value;
    wins += w1 && w2 && w3;
  }
  pass &= wins == 20;
  detail += "maximality wins 20x3: " + std::to_string(wins) + "/20; ";

  // First variations against the analytic formulas; the dense base keeps
  // the O(M^-2) polygonization bias of log f_* below the U3 tolerance.
  const WulffShape Kd = build_wulff(SurfaceTension::euclidean(2), 1024);
  VecX u(Kd.sample_count());
  for (int i = 0; i < Kd.sample_count(); ++i) {
    const double th = std::atan2(Kd.normals(1, i), Kd.normals(0, i));
    u(i) = 0.02 + 0.01 * std::cos(2.0 * th);
  }
  const double a1 = first_variation_Ui(Kd, u, DualPotentialKind::U1);
  const double fd1 =
      fd_first_variation_Ui(Kd, u, DualPotentialKind::U1, alpha, kSpec);
  const double a2 = first_variation_Ui(Kd, u, DualPotentialKind::U2);
  const double fd2 =
      fd_first_variation_Ui(Kd, u, DualPotentialKind::U2, beta, kSpec);
  const double fd3 =
      fd_first_variation_Ui(Kd, u, DualPotentialKind::U3, 0.0, kSpec);
  const double e1 = std::abs(fd1 - a1) / std::abs(a1);
  const double e2 = std::abs(fd2 - a2) / std::abs(a2);
  pass &= e1 <= 1e-3 && e2 <= 1e-3 && std::abs(fd3) <= 1e-6;
  detail += "fv rel errs " + format_double(e1) + ", " + format_double(e2) +
            ", U3 abs " + format_double(std::abs(fd3)) + "; ";

  // Star-family minimization of P_f + eps U1 at eps = 1e-3.
  StarFourierFamily fam;
  fam.base = build_wulff(SurfaceTension::euclidean(2), 192);
  fam.k_max = 3;
  fam.coef_bound = 0.02;
  fam.term = NonlocalTerm::U1;
  const EnergyParams p = EnergyParams::from_epsilon(2, alpha, 1e-3);
  const auto rep = minimize_nd(ShapeFamily{fam}, p, kSpec);
  const double u_inf = rep.canonical_field.cwiseAbs().maxCoeff();
  pass &= u_inf <= 1e-3;
  detail += "star u_inf " + format_double(u_inf);
  return {pass, detail};
}

std::pair<bool, std::string> c13_energy_scaling() {
  const double volK = build_wulff(half_l1(), 64).volume;
  std::string detail;
  bool pass = true;
  for (const auto& [n, alpha] :
       std::vector<std::pair<int, double>>{{2, 1.0}, {2, 0.5}}) {
    std::vector<double> xs, ys;
    for (double eps : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
      const auto mn = minimize_split_bound(eps, alpha, n, volK);
      if (mn.argmin >= 2) {
        xs.push_back(std::log(eps));
        ys.push_back(std::log(mn.value));
      }
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double want = 1.0 / (n + 1.0 - alpha);
    const double rel = std::abs(slope - want) / want;
    pass &= rel <= 0.05;
    detail += "(n=" + std::to_string(n) + ",a=" + format_double(alpha) +
              "): slope " + format_double(slope) + " vs " +
              format_double(want) + "; ";
  }
  return {pass, detail};
}

std::pair<bool, std::string> c14_curvature() {
  double worst = 0.0;
  const std::vector<SurfaceTension> fs = {
      SurfaceTension::euclidean(2), diag12(),
      SurfaceTension::perturbed2d(0.05, {{3, 1.0}})};
  for (const auto& f : fs) {
    const WulffShape K = build_wulff(f, 512);
    for (double r : {1.0, 0.6}) {
      ClosedCurve c;
      c.pts = r * K.points;
      const VecX h = aniso_curvature(c, f);
      for (int i = 0; i < h.size(); ++i)
        worst = std::max(worst, std::abs(h(i) - 1.0 / r) * r);
    }
  }
  return {worst <= 1e-2, "max rel curvature err " + format_double(worst)};
}

std::pair<bool, std::string> c15_determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  if (cli.empty() || !fs::exists(cli))
    return {false, "anisodrop CLI not found (pass its path as argv[1])"};
  const std::string d1 = "acc_det_run1", d2 = "acc_det_run2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  auto invoke = [&](const std::string& dir, int threads) {
    const std::string cmd = "ANISODROP_THREADS=" + std::to_string(threads) +
                            " \"" + cli + "\" --seed 777 --out " + dir +
                            " verify > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const int rc1 = invoke(d1, 1);
  const int rc2 = invoke(d2, 2);
  if (rc1 != rc2) return {false, "verify exit codes differ"};
  bool same = true;
  for (const std::string name : {"verify_report.json", "verify_report.csv"}) {
    const std::string a = read_file(d1 + "/" + name);
    const std::string b = read_file(d2 + "/" + name);
    same &= a == b;
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
  return {same, same ? "byte-identical verify outputs across runs and thread counts"
                     : "outputs differ"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";

  run(1, "ball potential closed form", c1_ball_potential);
  run(2, "crystalline rectangle perimeter", c2_crystal_perimeter);
  run(3, "rectangle criticality dV/da(1) = 0", c3_rectangle_criticality);
  run(4, "rectangle second variation 2 - C(alpha) eps", c4_second_variation);
  run(5, "crystal minimality a* = 1", c5_crystal_minimality);
  run(6, "box minimality (1,1,1)", c6_box_minimality);
  run(7, "Wulff non-criticality residuals", c7_wulff_noncritical);
  run(8, "Riesz constancy probe", c8_riesz_constancy);
  run(9, "scaling suite", c9_scaling_suite);
  run(10, "slicing identity and integrated bound", c10_slicing);
  run(11, "Lipschitz gap bound", c11_lipschitz);
  run(12, "dual-potential suite", c12_dual_potentials);
  run(13, "energy-scaling slope", c13_energy_scaling);
  run(14, "anisotropic curvature of K_r", c14_curvature);
  run(15, "determinism of cli_verify", [&] { return c15_determinism(cli); });

  bool all = true;
  for (const auto& r : g_results) {
    std::printf("[%s] C%02d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str());
    all &= r.pass;
  }
  std::printf("%s (%zu criteria)\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_results.size());
  return all ? 0 : 1;
}
