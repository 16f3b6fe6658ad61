// anisodrop: evaluate and minimize anisotropic liquid-drop energies over
// the finite-dimensional families where the problem reduces, and verify
// the identities and inequalities the model satisfies at desk scale.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "anisodrop/lab.hpp"

namespace {

using namespace anisodrop;

constexpr int kExitPass = 0;
constexpr int kExitAssert = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  long mc_samples = 0;
  bool parallel_sweep = false;
};

Json load_config(const GlobalOptions& g) {
  if (g.config_path.empty()) return Json::object();
  return Json::parse(read_file(g.config_path));
}

ExperimentConfig build_config(const GlobalOptions& g, const std::string& name) {
  Json j = load_config(g);
  if (!j.contains("name")) j["name"] = name.empty() ? "run" : name;
  if (!name.empty()) j["name"] = name;
  ExperimentConfig cfg = experiment_config_from_json(j);
  cfg.out_dir = g.out_dir;
  if (g.seed_set) cfg.quad.seed = g.seed;
  if (g.tol > 0.0) cfg.quad.rel_tol = g.tol;
  if (g.mc_samples > 0) cfg.quad.mc_samples = g.mc_samples;
  return cfg;
}

void write_out(const ExperimentConfig& cfg, const std::string& filename,
               const std::string& content) {
  std::filesystem::create_directories(cfg.out_dir);
  write_file(cfg.out_dir + "/" + filename, content);
}

int cmd_wulff(const GlobalOptions& g, int samples) {
  const ExperimentConfig cfg = build_config(g, "wulff");
  const SurfaceTension f = cfg.tension.empty()
                               ? SurfaceTension::euclidean(2)
                               : tension_from_json(cfg.tension);
  const WulffShape K = build_wulff(f, samples);
  Json j = wulff_to_json(K);
  j["config_hash"] = hex64(cfg.config_hash);
  write_out(cfg, "wulff.json", j.dump(2) + "\n");
  write_out(cfg, "wulff.csv",
            wulff_boundary_csv(K, "anisodrop wulff config_hash=" +
                                      hex64(cfg.config_hash)));
  std::cout << "wulff: |K| = " << format_double(K.volume)
            << ", P_f(K) = " << format_double(wulff_perimeter(K))
            << ", ell = " << format_double(K.ell)
            << ", L = " << format_double(K.ell_cap) << "\n";
  return kExitPass;
}

int cmd_energy(const GlobalOptions& g, const std::string& shape_path,
               const std::vector<std::string>& terms) {
  const ExperimentConfig cfg = build_config(g, "energy");
  const Shape E = shape_from_json(Json::parse(read_file(shape_path)));
  const SurfaceTension f = cfg.tension.empty()
                               ? SurfaceTension::euclidean(2)
                               : tension_from_json(cfg.tension);
  Json out;
  out["config_hash"] = hex64(cfg.config_hash);
  out["volume"] = volume(E);
  for (const std::string& term : terms.empty()
                                     ? std::vector<std::string>{"V"}
                                     : terms) {
    NonlocalTerm t;
    if (term == "V")
      t = NonlocalTerm::V;
    else if (term == "Vf")
      t = NonlocalTerm::Vf;
    else if (term == "U1")
      t = NonlocalTerm::U1;
    else if (term == "U2")
      t = NonlocalTerm::U2;
    else if (term == "U3")
      t = NonlocalTerm::U3;
    else
      throw std::invalid_argument("energy: unknown term '" + term + "'");
    const EnergyBreakdown b =
        energy_with_term(E, f, t, cfg.params.epsilon, cfg.params, cfg.quad);
    out["terms"][term] = breakdown_to_json(b);
  }
  if (std::holds_alternative<Polygon2D>(E) ||
      std::holds_alternative<Box>(E)) {
    const TotalEnergy te = total_energy(E, f, cfg.params, cfg.quad);
    out["mass_form"] = breakdown_to_json(te.mass_form);
    out["rescaled_form"] = breakdown_to_json(te.rescaled_form);
  }
  write_out(cfg, "energy.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return kExitPass;
}

int cmd_verify(const GlobalOptions& g, const std::vector<std::string>& suites) {
  const ExperimentConfig cfg = build_config(g, "verify");
  const auto reports = run_verify(suites, cfg.quad);
  const Json j = verify_report_json(reports, cfg.quad);
  write_out(cfg, "verify_report.json", j.dump(2) + "\n");
  write_out(cfg, "verify_report.csv",
            verify_report_csv(reports, "anisodrop verify config_hash=" +
                                           hex64(cfg.config_hash)));
  bool all = true;
  for (const auto& r : reports) {
    std::cout << (r.passed() ? "[PASS] " : "[FAIL] ") << r.suite << " ("
              << r.checks.size() << " checks)\n";
    all &= r.passed();
    if (!r.passed())
      for (const auto& c : r.checks)
        if (!c.pass)
          std::cout << "       failed: " << c.name
                    << " margin=" << format_double(c.margin) << "\n";
  }
  return all ? kExitPass : kExitAssert;
}

int cmd_experiment(const GlobalOptions& g, const std::string& name) {
  const ExperimentConfig cfg = build_config(g, name);
  const int code = run_experiment(cfg);
  std::cout << "experiment " << name << ": "
            << (code == 0 ? "pass" : "fail") << " (exit " << code << ")\n";
  return code;
}

int cmd_minimize(const GlobalOptions& g) {
  const ExperimentConfig cfg = build_config(g, "minimize");
  const ShapeFamily family = family_from_json(cfg.family, cfg.tension);
  OptimizationReport rep;
  if (std::holds_alternative<RectangleFamily>(family))
    rep = minimize_1d(std::get<RectangleFamily>(family), cfg.params, cfg.quad);
  else
    rep = minimize_nd(family, cfg.params, cfg.quad);
  Json j;
  j["config_hash"] = hex64(cfg.config_hash);
  j["family"] = rep.family;
  Json params = Json::array();
  for (int i = 0; i < rep.best_params.size(); ++i)
    params.push_back(rep.best_params(i));
  j["best_params"] = params;
  j["energy"] = breakdown_to_json(rep.energy);
  j["converged"] = rep.converged;
  j["wall_time_s"] = rep.wall_time_s;
  j["best_shape"] = shape_to_json(rep.best_shape);
  write_out(cfg, "minimize_report.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return rep.converged ? kExitPass : kExitNumeric;
}

int cmd_scan(const GlobalOptions& g) {
  const ExperimentConfig cfg = build_config(g, "scan");
  if (cfg.sweep.empty())
    throw std::invalid_argument("scan: config needs a nonempty sweep");
  const ShapeFamily family = family_from_json(cfg.family, cfg.tension);
  const auto reports = scan(family, cfg.params, cfg.sweep, cfg.quad);
  write_out(cfg, "scan.csv",
            scan_csv(cfg.sweep, reports,
                     "anisodrop scan config_hash=" + hex64(cfg.config_hash)));
  bool all = true;
  for (const auto& r : reports) all &= r.converged;
  std::cout << "scan: " << reports.size() << " points, "
            << (all ? "all converged" : "with flagged points") << "\n";
  return all ? kExitPass : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisodrop: anisotropic liquid-drop energy laboratory"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--out", g.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed override");
  app.add_option("--tol", g.tol, "quadrature relative tolerance override");
  app.add_option("--mc-samples", g.mc_samples, "Monte Carlo sample override");
  app.add_flag("--parallel-sweep", g.parallel_sweep,
               "run sweep points in parallel");

  auto* wulff = app.add_subcommand("wulff", "build and export a Wulff shape");
  int samples = 256;
  wulff->add_option("--samples", samples, "boundary sample count");

  auto* energy = app.add_subcommand("energy", "evaluate energies of a shape");
  std::string shape_path;
  std::vector<std::string> terms;
  energy->add_option("--shape", shape_path, "shape JSON file")->required();
  energy->add_option("--term", terms, "V, Vf, U1, U2, U3 (repeatable)");

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  std::vector<std::string> suites;
  verify->add_option("--suite", suites, "suite subset (repeatable)");

  auto* experiment =
      app.add_subcommand("experiment", "run a named experiment");
  std::string exp_name;
  experiment->add_option("name", exp_name, "experiment name")->required();

  app.add_subcommand("minimize", "minimize over a shape family");
  app.add_subcommand("scan", "sweep epsilon over a shape family");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    if (wulff->parsed()) return cmd_wulff(g, samples);
    if (energy->parsed()) return cmd_energy(g, shape_path, terms);
    if (verify->parsed()) return cmd_verify(g, suites);
    if (experiment->parsed()) return cmd_experiment(g, exp_name);
    if (app.get_subcommand("minimize")->parsed()) return cmd_minimize(g);
    if (app.get_subcommand("scan")->parsed()) return cmd_scan(g);
  } catch (const anisodrop::ConvergenceError& e) {
    std::cerr << "numerical non-convergence: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssert;
  }
  return kExitConfig;
}
