#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dislo/layer.hpp"
#include "dislo/potential.hpp"

namespace dislo {

// Node-inclusive uniform grid on [-Lx, Lx] x [0, Ly]; the first grid row
// (j = 0) is the dynamic interface, lateral columns are clamped.
struct FieldGrid {
  double Lx = 4.8, Ly = 8.0;
  int nx = 0, ny = 0;
  double hx() const { return 2.0 * Lx / (nx - 1); }
  double hy() const { return Ly / (ny - 1); }
  double x(int i) const { return -Lx + i * hx(); }
  double y(int j) const { return j * hy(); }
};

struct Field {
  FieldGrid grid;
  double eps = 0.1, a_exponent = 1.0, time = 0.0;
  std::vector<double> values;  // row-major, values[j*nx + i]

  double& at(int i, int j) { return values[static_cast<size_t>(j) * grid.nx + i]; }
  double at(int i, int j) const {
    return values[static_cast<size_t>(j) * grid.nx + i];
  }
  std::vector<double> boundary_trace() const;
};

struct TimeConfig {
  double T = 0.5;
  double dt = 0.0;  // 0 -> eps^2 * safety
  int snapshot_every = 0;  // steps between samples; 0 -> ~8 samples
};

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 200;
  double cfl_safety = 0.25;  // dt cap is cfl_safety * eps^2
};

struct RunConfig {
  std::string scenario = "run";
  std::string potential = "sine";  // "sine" or CSV path
  double epsilon = 0.1;
  double a = 1.0;
  std::vector<double> centers = {-0.5, 0.5};
  FieldGrid domain;  // nx/ny == 0 -> resolved from hx = eps/8
  TimeConfig time;
  SolverConfig solver;
  std::string layer = "explicit";  // "explicit" | "general"
  bool store_fields = true;

  std::string canonical_string() const;
  std::string hash() const;
};

RunConfig load_run_config(const std::string& json_path);

struct SolutionRecord {
  std::vector<double> times;
  std::vector<std::vector<double>> traces;     // boundary trace per sample
  std::vector<std::vector<double>> crossings;  // per sample, N entries
  std::vector<double> energies;                // per sample (2-D runs)
  std::vector<Field> fields;                   // full snapshots if requested
  std::string config_hash;
  double eps = 0.0, a_exponent = 0.0;
  int num_layers = 0;
};

// u0(x,y) = sum_i phi((x - z_i)/eps, y/eps) sampled on the grid.
Field init_superposition(const std::vector<double>& centers, double eps,
                         const LayerProfile& layer, const FieldGrid& grid,
                         double a_exponent);

// (eps/2) Int |grad u|^2 + Int W(u(.,0)), trapezoid with centered
// differences inside and one-sided second-order differences at edges.
double energy(const Field& field, const PotentialSpec& potential);

// x-locations where the trace crosses the half-integer levels i - 1/2,
// i = 1..N, by linear interpolation; throws TrackingError when a level is
// never reached.
std::vector<double> track_crossings(const std::vector<double>& trace, int N,
                                    double x_left, double hx);

// Semi-implicit stepper: backward-Euler bulk, boundary row with W'
// linearized about the current state, one coupled linear solve per step via
// an x-DST / y-sweep fast preconditioner iterated to the solver tolerance.
// Lateral columns stay frozen at the initial profile.
class CoupledSolver {
 public:
  CoupledSolver(const Field& initial, PotentialSpec potential,
                SolverConfig config = {});
  ~CoupledSolver();
  CoupledSolver(const CoupledSolver&) = delete;
  CoupledSolver& operator=(const CoupledSolver&) = delete;

  Field step(const Field& field, double dt);
  int last_iterations() const { return last_iterations_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int last_iterations_ = 0;
};

// Convenience single step constructing a throwaway solver.
Field step(const Field& field, double dt, const PotentialSpec& potential);

// Full orchestrated run from a config.
SolutionRecord run(const RunConfig& config);

// 1-D nonlocal reduction solved with a periodic IMEX spectral scheme on the
// deviation from the frozen initial superposition.
SolutionRecord solve_reduced_fractional(const RunConfig& config);

// Shared helper: resolve grid sizes from the hx = eps/8 rule when unset.
FieldGrid resolve_grid(const RunConfig& config);
// Shared helper: build the layer profile named by the config.
LayerProfile make_layer(const RunConfig& config, const PotentialSpec& potential);

}  // namespace dislo
