// Command-line front end: simulate, ode, correctors, barriers, sweep, verify.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dislo/acceptance.hpp"
#include "dislo/errors.hpp"
#include "dislo/barriers.hpp"
#include "dislo/correctors.hpp"
#include "dislo/coupled_solver.hpp"
#include "dislo/experiment.hpp"
#include "dislo/io.hpp"
#include "dislo/layer.hpp"
#include "dislo/particle_ode.hpp"
#include "dislo/potential.hpp"

namespace fs = std::filesystem;
using namespace dislo;

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void info(const std::string& msg) {
  if (g_log_level >= 1) std::printf("%s\n", msg.c_str());
}

std::vector<double> parse_centers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& layer_kind) {
  RunConfig rc = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  if (!layer_kind.empty()) rc.layer = layer_kind;
  fs::create_directories(out_dir);
  SolutionRecord rec = run(rc);

  CsvTable crossings;
  crossings.header = {"t"};
  for (int i = 1; i <= rec.num_layers; ++i)
    crossings.header.push_back("x_" + std::to_string(i));
  for (size_t k = 0; k < rec.times.size(); ++k) {
    std::vector<double> row = {rec.times[k]};
    for (double c : rec.crossings[k]) row.push_back(c);
    crossings.rows.push_back(std::move(row));
  }
  write_csv(out_dir + "/crossings.csv", crossings);

  CsvTable en;
  en.header = {"t", "E"};
  for (size_t k = 0; k < rec.times.size(); ++k)
    en.rows.push_back({rec.times[k], rec.energies[k]});
  write_csv(out_dir + "/energy.csv", en);

  for (size_t k = 0; k < rec.fields.size(); ++k) {
    const Field& f = rec.fields[k];
    std::ostringstream base;
    base << out_dir << "/snapshot_" << k;
    write_field_binary(base.str(), f.values, f.grid.nx, f.grid.ny, f.grid.Lx,
                       f.grid.Ly, f.eps, f.a_exponent, f.time);
  }
  info("simulate: " + std::to_string(rec.times.size()) + " samples -> " + out_dir);
  return 0;
}

int cmd_ode(const std::string& centers_str, double c0, double delta,
            const std::string& orientation, double T, double tol,
            const std::string& out_dir) {
  std::vector<double> centers = parse_centers(centers_str);
  Orientation o = Orientation::None;
  if (orientation == "super") o = Orientation::Super;
  else if (orientation == "sub") o = Orientation::Sub;
  else if (orientation != "none")
    throw ConfigError("orientation must be super|none|sub");
  if (c0 <= 0.0) {
    auto [computed, alpha] = compute_constants(LayerProfile::explicit_arctan(),
                                               PotentialSpec::sinusoidal());
    (void)alpha;
    c0 = computed;
  }
  ParticleTrajectory traj = integrate(ParticleState{centers, 0.0}, c0, delta, o, T, tol);

  fs::create_directories(out_dir);
  CsvTable t;
  t.header = {"t"};
  const int n = traj.num_particles();
  for (int i = 1; i <= n; ++i) t.header.push_back("z_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) t.header.push_back("v_" + std::to_string(i));
  const int samples = 200;
  for (int k = 0; k <= samples; ++k) {
    double tt = T * k / samples;
    std::vector<double> row = {tt};
    for (int i = 0; i < n; ++i) row.push_back(traj.position(i, tt));
    for (int i = 0; i < n; ++i) row.push_back(traj.velocity(i, tt));
    t.rows.push_back(std::move(row));
  }
  write_csv(out_dir + "/trajectory.csv", t);
  info("ode: trajectory with " + std::to_string(traj.samples().size()) +
       " accepted steps -> " + out_dir + "/trajectory.csv");
  return 0;
}

int cmd_correctors(const std::string& layer_kind, double eps, double b,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  PotentialSpec potential = PotentialSpec::sinusoidal();
  RunConfig lc;
  lc.layer = layer_kind;
  LayerProfile layer = make_layer(lc, potential);
  auto [c0, alpha] = compute_constants(layer, potential);
  PsiProfile psi = solve_psi(layer, potential, c0, alpha, Grid1D{300.0, 3072});

  CsvTable pt;
  pt.header = {"x", "psi0"};
  for (int i = 0; i <= 4000; ++i) {
    double x = -200.0 + 0.1 * i;
    pt.rows.push_back({x, psi.trace(x)});
  }
  write_csv(out_dir + "/psi_trace.csv", pt);

  QField q = build_q(layer, eps, b);
  CsvTable qt;
  qt.header = {"x", "y", "q", "qx", "qy"};
  for (double y : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
    for (int i = -20; i <= 20; ++i) {
      double x = 2.0 * i;
      qt.rows.push_back({x, y, q.value(x, y), q.deriv_x(x, y), q.deriv_y(x, y)});
    }
  write_csv(out_dir + "/q_samples.csv", qt);

  Report bounds = verify_corrector_bounds(q, psi);
  write_text_file(out_dir + "/bounds_report.json", bounds.to_json());
  info("correctors: " + bounds.summary_line());
  return bounds.all_pass() ? 0 : 1;
}

int cmd_barriers(double a, double delta, double eps,
                 const std::string& centers_str, double T,
                 const std::string& out_dir) {
  fs::create_directories(out_dir);
  PotentialSpec potential = PotentialSpec::sinusoidal();
  auto layer = std::make_shared<LayerProfile>(LayerProfile::explicit_arctan());
  auto [c0, alpha] = compute_constants(*layer, potential);
  std::vector<double> centers = parse_centers(centers_str);

  BarrierExponents expo = select_exponents(a, delta, alpha);
  {
    std::ostringstream os;
    os << "{\"a\":" << format_double(expo.a) << ",\"b\":" << format_double(expo.b)
       << ",\"theta\":" << format_double(expo.theta)
       << ",\"gamma\":" << format_double(expo.gamma)
       << ",\"tau\":" << format_double(expo.tau) << ",\"r\":" << format_double(expo.r)
       << ",\"k0\":" << expo.k0 << ",\"k1\":" << expo.k1
       << ",\"delta\":" << format_double(expo.delta)
       << ",\"delta_tilde\":" << format_double(expo.delta_tilde) << "}\n";
    write_text_file(out_dir + "/exponents.json", os.str());
  }

  auto psi = std::make_shared<PsiProfile>(
      solve_psi(*layer, potential, c0, alpha, Grid1D{300.0, 3072}));
  ParticleState init{centers, 0.0};
  ParticleTrajectory ts = integrate(init, c0, delta, Orientation::Super, T, 1e-10);
  ParticleTrajectory tb = integrate(init, c0, delta, Orientation::Sub, T, 1e-10);
  RunConfig rc;
  rc.epsilon = eps;
  rc.a = a;
  rc.centers = centers;
  rc.time.T = T;
  rc.store_fields = true;
  FieldGrid grid = resolve_grid(rc);
  double x_span = (grid.Lx + 2.0) / eps;
  double y_span = std::max(grid.Ly / eps, 2.5 * 2.0 * std::pow(eps, -expo.b));
  auto q = std::make_shared<QField>(build_q(*layer, eps, expo.b, x_span, y_span));
  BarrierOptions opt;
  opt.psi_x_span = x_span;
  opt.psi_y_span = std::max(130.0, grid.Ly / eps + 5.0);
  BarrierEvaluator sup(BarrierKind::Super, expo, eps, ts, layer, psi, q,
                       potential, opt);
  BarrierEvaluator sub(BarrierKind::Sub, expo, eps, tb, layer, psi, q,
                       potential, opt);

  ResidualOptions ropt;
  auto samples = generate_case_samples(expo, eps, ts, T, ropt);
  CsvTable residuals;
  residuals.header = {"x", "y", "t", "case", "margin"};
  for (const auto& s : samples) {
    double m = s.case_id == 0 ? sup.boundary_margin(s.x, s.t)
                              : sup.interior_margin(s.x, s.y, s.t);
    residuals.rows.push_back({s.x, s.y, s.t, static_cast<double>(s.case_id), m});
  }
  write_csv(out_dir + "/residuals.csv", residuals);
  Report res_super = residual_check(sup, samples, ropt);

  SolutionRecord rec = run(rc);
  Report sw = sandwich_check(rec, sup, sub);
  write_text_file(out_dir + "/sandwich_report.json", sw.to_json());
  info("barriers: " + res_super.summary_line());
  info("barriers: " + sw.summary_line());
  return (res_super.all_pass() && sw.all_pass()) ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int threads) {
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{}
                                             : load_experiment_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (threads > 0) cfg.threads = threads;
  SweepResult r = run_sweep(cfg);
  info(r.summary.summary_line());
  return r.summary.all_pass() ? 0 : 1;
}

int cmd_verify(const std::string& only, const std::string& out_dir) {
  AcceptanceOptions opt;
  opt.verbose = g_log_level >= 1;
  if (!only.empty()) {
    std::stringstream ss(only);
    std::string tok;
    while (std::getline(ss, tok, ',')) opt.only.push_back(std::stoi(tok));
  }
  auto results = run_acceptance(opt);
  fs::create_directories(out_dir.empty() ? "." : out_dir);
  write_text_file((out_dir.empty() ? "." : out_dir) + std::string("/summary.json"),
                  acceptance_summary_json(results));
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilayer dislocation dynamics simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  int threads = 1;
  std::string log_level = "info";
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_option("--log-level", log_level, "quiet|info|debug");

  auto* sim = app.add_subcommand("simulate", "run the coupled solver");
  std::string layer_kind;
  sim->add_option("--layer", layer_kind, "explicit|general");

  auto* ode = app.add_subcommand("ode", "integrate the particle system");
  std::string centers = "-0.5,0.5", orientation = "none";
  double c0 = 0.0, delta = 0.0, T = 1.0, tol = 1e-9;
  ode->add_option("--centers", centers, "comma separated initial centers");
  ode->add_option("--c0", c0, "mobility constant (default: from the layer)");
  ode->add_option("--delta", delta, "perturbation size");
  ode->add_option("--orientation", orientation, "super|none|sub");
  ode->add_option("--T", T, "final time");
  ode->add_option("--tol", tol, "relative tolerance");

  auto* corr = app.add_subcommand("correctors", "solve psi and build q");
  std::string corr_layer = "explicit";
  double corr_eps = 0.1, corr_b = 0.5;
  corr->add_option("--layer", corr_layer, "explicit|general");
  corr->add_option("--eps", corr_eps, "epsilon for the q cutoff");
  corr->add_option("--b", corr_b, "cutoff exponent b");

  auto* bar = app.add_subcommand("barriers", "build and check barriers");
  double bar_a = 1.0, bar_delta = 0.05, bar_eps = 0.1, bar_T = 0.5;
  std::string bar_centers = "-0.5,0.5";
  bar->add_option("--a", bar_a, "bulk relaxation exponent");
  bar->add_option("--delta", bar_delta, "perturbation size");
  bar->add_option("--eps", bar_eps, "epsilon");
  bar->add_option("--centers", bar_centers, "initial centers");
  bar->add_option("--T", bar_T, "final time");

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep with tables");

  auto* verify = app.add_subcommand("verify", "run acceptance criteria");
  std::string only;
  verify->add_option("--only", only, "comma separated criterion ids");

  CLI11_PARSE(app, argc, argv);
  g_log_level = log_level == "quiet" ? 0 : (log_level == "debug" ? 2 : 1);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, layer_kind);
    if (ode->parsed())
      return cmd_ode(centers, c0, delta, orientation, T, tol, out_dir);
    if (corr->parsed()) return cmd_correctors(corr_layer, corr_eps, corr_b, out_dir);
    if (bar->parsed())
      return cmd_barriers(bar_a, bar_delta, bar_eps, bar_centers, bar_T, out_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, threads);
    if (verify->parsed()) return cmd_verify(only, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
