#pragma once

#include <string>
#include <vector>

#include "dislo/coupled_solver.hpp"
#include "dislo/io.hpp"
#include "dislo/particle_ode.hpp"
#include "dislo/report.hpp"

namespace dislo {

struct ExperimentConfig {
  std::string scenario = "demo";
  RunConfig base;                       // template; epsilon replaced per entry
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  std::vector<double> delta_list = {0.1, 0.05, 0.025};
  double crossing_tol_eps_multiple = 5.0;
  double band_y0 = 0.5;
  double bulk_tol_at_min_eps = 0.1;
  std::string out_dir = "sweep_out";
  int threads = 1;

  void validate() const;  // strictly decreasing lists, resolvable grids
};

ExperimentConfig load_experiment_config(const std::string& json_path);

struct ConvergenceRow {
  double eps = 0.0;
  double time = 0.0;
  std::vector<double> crossing_errors;  // |x_hat_i - z_i| per layer
  double bulk_sup_error = -1.0;         // <0 when not evaluated
  bool flagged = false;                 // crossing error exceeded multiple*eps
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  CsvTable to_csv() const;
};

// Per-sample-time crossing errors of a PDE record against the unperturbed
// trajectory; rows flagged when the error exceeds `eps_multiple * eps`.
std::vector<ConvergenceRow> compare_ode_pde(const SolutionRecord& record,
                                            const ParticleTrajectory& trajectory,
                                            double eps_multiple = 5.0);

// Sup-norm distance of the stored fields to the arctan superposition with
// trajectory centers, over the band y >= band_y0.
std::vector<ConvergenceRow> bulk_limit_check(const SolutionRecord& record,
                                             const ParticleTrajectory& trajectory,
                                             double band_y0);

struct EpsTrace {
  double eps = 0.0;
  double x_left = 0.0, hx = 0.0;
  std::vector<double> trace;
};

// Step-function limit of the boundary trace: integer plateaus away from the
// centers (within the layer-tail tolerance) and the [i-1, i] envelope band
// at the centers; also checks that plateau deviations shrink along the
// sweep.
Report envelope_check(const std::vector<EpsTrace>& traces,
                      const ParticleTrajectory& trajectory, double t);

struct SweepResult {
  ConvergenceTable table;
  Report summary;
  std::string out_dir;
};

// Runs every epsilon entry (optionally across threads), persists crossing
// and energy CSVs, snapshots and tables, and writes a machine-readable
// summary with one status line per sweep-level criterion.
SweepResult run_sweep(const ExperimentConfig& config);

}  // namespace dislo
