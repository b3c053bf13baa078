#include "dislo/coupled_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dislo/errors.hpp"
#include "dislo/io.hpp"
#include "dislo/spectral.hpp"

namespace dislo {

std::vector<double> Field::boundary_trace() const {
  return std::vector<double>(values.begin(), values.begin() + grid.nx);
}

std::string RunConfig::canonical_string() const {
  std::ostringstream os;
  os << scenario << '|' << potential << '|' << format_double(epsilon) << '|'
     << format_double(a) << '|';
  for (double c : centers) os << format_double(c) << ',';
  os << '|' << format_double(domain.Lx) << 'x' << format_double(domain.Ly)
     << '|' << domain.nx << 'x' << domain.ny << '|' << format_double(time.T)
     << '|' << format_double(time.dt) << '|' << time.snapshot_every << '|'
     << format_double(solver.tol) << '|' << solver.max_iter << '|' << layer
     << '|' << format_double(solver.cfl_safety);
  return os.str();
}

std::string RunConfig::hash() const {
  // FNV-1a over the canonical string.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_string()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

RunConfig load_run_config(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw FormatError("cannot open config: " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw FormatError("config parse error in " + json_path + ": " + e.what());
  }
  RunConfig cfg;
  cfg.scenario = j.value("scenario", cfg.scenario);
  cfg.potential = j.value("potential", cfg.potential);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.a = j.value("a", cfg.a);
  if (j.contains("centers")) cfg.centers = j["centers"].get<std::vector<double>>();
  if (j.contains("domain")) {
    cfg.domain.Lx = j["domain"].value("Lx", cfg.domain.Lx);
    cfg.domain.Ly = j["domain"].value("Ly", cfg.domain.Ly);
  }
  if (j.contains("grid")) {
    cfg.domain.nx = j["grid"].value("nx", 0);
    cfg.domain.ny = j["grid"].value("ny", 0);
  }
  if (j.contains("time")) {
    cfg.time.T = j["time"].value("T", cfg.time.T);
    cfg.time.dt = j["time"].value("dt", cfg.time.dt);
    cfg.time.snapshot_every = j["time"].value("snapshot_every", 0);
  }
  if (j.contains("solver")) {
    cfg.solver.tol = j["solver"].value("tol", cfg.solver.tol);
    cfg.solver.max_iter = j["solver"].value("max_iter", cfg.solver.max_iter);
    cfg.solver.cfl_safety = j["solver"].value("cfl_safety", cfg.solver.cfl_safety);
  }
  cfg.layer = j.value("layer", cfg.layer);
  cfg.store_fields = j.value("store_fields", cfg.store_fields);
  return cfg;
}

FieldGrid resolve_grid(const RunConfig& config) {
  FieldGrid g = config.domain;
  const double h = config.epsilon / 8.0;
  if (g.nx == 0) g.nx = static_cast<int>(std::lround(2.0 * g.Lx / h)) + 1;
  if (g.ny == 0) g.ny = static_cast<int>(std::lround(g.Ly / h)) + 1;
  return g;
}

LayerProfile make_layer(const RunConfig& config, const PotentialSpec& potential) {
  if (config.layer == "explicit") return LayerProfile::explicit_arctan();
  if (config.layer == "general")
    return solve_layer_general(potential, Grid1D{200.0, 4096});
  throw ConfigError("layer must be 'explicit' or 'general', got " + config.layer);
}

Field init_superposition(const std::vector<double>& centers, double eps,
                         const LayerProfile& layer, const FieldGrid& grid,
                         double a_exponent) {
  if (grid.nx < 8 || grid.ny < 8)
    throw ConfigError("init_superposition: grid too small");
  if (grid.hx() > eps / 8.0 * (1.0 + 1e-9) || grid.hy() > eps / 8.0 * (1.0 + 1e-9))
    throw ConfigError("init_superposition: unresolved core (need h <= eps/8)");
  for (double z : centers)
    if (!(z > -grid.Lx + 1.0 && z < grid.Lx - 1.0))
      throw ConfigError("init_superposition: center too close to a wall");
  for (size_t i = 1; i < centers.size(); ++i)
    if (!(centers[i] > centers[i - 1]))
      throw ConfigError("init_superposition: centers must be increasing");

  Field f;
  f.grid = grid;
  f.eps = eps;
  f.a_exponent = a_exponent;
  f.values.assign(static_cast<size_t>(grid.nx) * grid.ny, 0.0);
  for (int j = 0; j < grid.ny; ++j) {
    double Y = grid.y(j) / eps;
    for (int i = 0; i < grid.nx; ++i) {
      double sum = 0.0;
      for (double z : centers) sum += layer.value((grid.x(i) - z) / eps, Y);
      f.at(i, j) = sum;
    }
  }
  return f;
}

double energy(const Field& field, const PotentialSpec& potential) {
  const FieldGrid& g = field.grid;
  const double hx = g.hx(), hy = g.hy();
  auto dx = [&](int i, int j) {
    if (i == 0) return (-3 * field.at(0, j) + 4 * field.at(1, j) - field.at(2, j)) / (2 * hx);
    if (i == g.nx - 1)
      return (3 * field.at(i, j) - 4 * field.at(i - 1, j) + field.at(i - 2, j)) / (2 * hx);
    return (field.at(i + 1, j) - field.at(i - 1, j)) / (2 * hx);
  };
  auto dy = [&](int i, int j) {
    if (j == 0) return (-3 * field.at(i, 0) + 4 * field.at(i, 1) - field.at(i, 2)) / (2 * hy);
    if (j == g.ny - 1)
      return (3 * field.at(i, j) - 4 * field.at(i, j - 1) + field.at(i, j - 2)) / (2 * hy);
    return (field.at(i, j + 1) - field.at(i, j - 1)) / (2 * hy);
  };
  double bulk = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i < g.nx; ++i) {
      double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      double gx = dx(i, j), gy = dy(i, j);
      bulk += wx * wy * (gx * gx + gy * gy);
    }
  }
  bulk *= 0.5 * field.eps * hx * hy;
  double interface = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
    interface += wx * potential.w_value(field.at(i, 0));
  }
  interface *= hx;
  return bulk + interface;
}

std::vector<double> track_crossings(const std::vector<double>& trace, int N,
                                    double x_left, double hx) {
  if (N < 1) throw DomainError("track_crossings: N >= 1");
  std::vector<double> out;
  out.reserve(N);
  size_t start = 0;
  for (int level_i = 1; level_i <= N; ++level_i) {
    double level = level_i - 0.5;
    bool found = false;
    for (size_t j = start; j + 1 < trace.size(); ++j) {
      if (trace[j] <= level && trace[j + 1] > level) {
        double frac = (level - trace[j]) / (trace[j + 1] - trace[j]);
        out.push_back(x_left + hx * (static_cast<double>(j) + frac));
        start = j;
        found = true;
        break;
      }
    }
    if (!found)
      throw TrackingError("track_crossings: trace never reaches level " +
                          std::to_string(level));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CoupledSolver

struct CoupledSolver::Impl {
  FieldGrid grid;
  double eps = 0.1, a_exp = 1.0;
  PotentialSpec potential;
  SolverConfig config;
  std::vector<double> wall_left, wall_right;  // frozen lateral profiles

  int m = 0;  // interior columns
  std::unique_ptr<Dst1Batch> dst;
  std::vector<double> beta, denom;  // [j*m + k], state independent
  std::vector<double> denom0;       // row-0 pivot per mode
  double cached_dt = -1.0;

  std::vector<double> work;   // (ny x m) transform buffer
  std::vector<double> alpha;  // (ny x m)

  void prepare(double dt) {
    if (dt == cached_dt) return;
    cached_dt = dt;
    const int ny = grid.ny;
    const double hy = grid.hy();
    const double s = 1.0 / (hy * hy);
    const double sigma_b = std::pow(eps, a_exp) / dt;
    const double a0 = eps / dt + 1.5 / hy;
    const double b0 = -2.0 / hy, c0 = 0.5 / hy;

    beta.assign(static_cast<size_t>(ny) * m, 0.0);
    denom.assign(static_cast<size_t>(ny) * m, 0.0);
    denom0.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
      double sn = std::sin(std::numbers::pi * (k + 1) / (2.0 * (m + 1)));
      double lam = 4.0 / (grid.hx() * grid.hx()) * sn * sn;
      double D = sigma_b + lam + 2.0 * s;
      // top row ghost doubles the sub-diagonal
      double bprev = 2.0 * s / D;
      beta[static_cast<size_t>(ny - 1) * m + k] = bprev;
      denom[static_cast<size_t>(ny - 1) * m + k] = D;
      for (int j = ny - 2; j >= 1; --j) {
        double dd = D - s * bprev;
        double bj = s / dd;
        beta[static_cast<size_t>(j) * m + k] = bj;
        denom[static_cast<size_t>(j) * m + k] = dd;
        bprev = bj;
      }
      double b1 = beta[static_cast<size_t>(1) * m + k];
      double b2 = beta[static_cast<size_t>(2) * m + k];
      denom0[k] = a0 + b0 * b1 + c0 * b2 * b1;
    }
    work.assign(static_cast<size_t>(ny) * m, 0.0);
    alpha.assign(static_cast<size_t>(ny) * m, 0.0);
  }

  // Solve Abar d = r for the interior columns of r (ny x m, row-major) and
  // leave d in `work`.
  void fast_solve(double dt) {
    const int ny = grid.ny;
    const double hy = grid.hy();
    const double s = 1.0 / (hy * hy);
    const double b0 = -2.0 / hy, c0 = 0.5 / hy;
    (void)dt;

    dst->execute(work.data());

    // Backward sweep for alpha (beta precomputed).
    double* arow = alpha.data();
    const double* brow = beta.data();
    {
      const size_t top = static_cast<size_t>(ny - 1) * m;
      for (int k = 0; k < m; ++k) arow[top + k] = work[top + k] / denom[top + k];
      for (int j = ny - 2; j >= 1; --j) {
        const size_t row = static_cast<size_t>(j) * m;
        const size_t nxt = row + m;
        for (int k = 0; k < m; ++k)
          arow[row + k] = (work[row + k] + s * arow[nxt + k]) /
                          denom[row + k];
      }
    }
    // Interface row pivot, then forward substitution downward in j.
    {
      const size_t r1 = static_cast<size_t>(1) * m, r2 = static_cast<size_t>(2) * m;
      for (int k = 0; k < m; ++k) {
        double a1 = arow[r1 + k], a2 = arow[r2 + k];
        double b2 = brow[r2 + k];
        double rhs0 = work[k] - b0 * a1 - c0 * (a2 + b2 * a1);
        work[k] = rhs0 / denom0[k];
      }
      for (int j = 1; j < ny; ++j) {
        const size_t row = static_cast<size_t>(j) * m;
        const size_t prv = row - m;
        for (int k = 0; k < m; ++k)
          work[row + k] = arow[row + k] + brow[row + k] * work[prv + k];
      }
    }

    dst->execute(work.data());
    const double scale = 1.0 / (2.0 * (m + 1));
    for (double& v : work) v *= scale;
  }
};

CoupledSolver::CoupledSolver(const Field& initial, PotentialSpec potential,
                             SolverConfig config)
    : impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.grid = initial.grid;
  im.eps = initial.eps;
  im.a_exp = initial.a_exponent;
  im.potential = std::move(potential);
  im.config = config;
  if (im.grid.nx < 8 || im.grid.ny < 8)
    throw ConfigError("CoupledSolver: grid too small");
  im.m = im.grid.nx - 2;
  im.dst = std::make_unique<Dst1Batch>(im.m, im.grid.ny);
  im.wall_left.resize(im.grid.ny);
  im.wall_right.resize(im.grid.ny);
  for (int j = 0; j < im.grid.ny; ++j) {
    im.wall_left[j] = initial.at(0, j);
    im.wall_right[j] = initial.at(im.grid.nx - 1, j);
  }
}

CoupledSolver::~CoupledSolver() = default;

Field CoupledSolver::step(const Field& field, double dt) {
  auto& im = *impl_;
  const FieldGrid& g = im.grid;
  if (field.grid.nx != g.nx || field.grid.ny != g.ny)
    throw ConfigError("CoupledSolver::step: field/grid mismatch");
  const double eps = im.eps;
  if (!(dt > 0.0)) throw ConfigError("CoupledSolver::step: dt > 0");
  if (dt > im.config.cfl_safety * eps * eps * (1.0 + 1e-9))
    throw ConfigError("CoupledSolver::step: dt exceeds cfl_safety*eps^2 cap");
  im.prepare(dt);

  const int nx = g.nx, ny = g.ny, m = im.m;
  const double hx = g.hx(), hy = g.hy();
  const double sx = 1.0 / (hx * hx), sy = 1.0 / (hy * hy);
  const double sigma_b = std::pow(eps, im.a_exp) / dt;
  const double sigma_i = eps / dt;

  Field out = field;
  out.time = field.time + dt;
  // Walls stay frozen.
  for (int j = 0; j < ny; ++j) {
    out.at(0, j) = im.wall_left[j];
    out.at(nx - 1, j) = im.wall_right[j];
  }

  // Boundary-row linearization data from the current state.
  std::vector<double> wp(nx), wpp(nx);
  for (int i = 0; i < nx; ++i) {
    wp[i] = im.potential.w_prime(field.at(i, 0));
    wpp[i] = im.potential.w_double_prime(field.at(i, 0));
  }

  double scale = 1.0;
  for (int i = 0; i < nx; ++i)
    scale = std::max(scale, std::fabs(wp[i]) / eps + sigma_i * std::fabs(field.at(i, 0)));
  const double tol_abs = im.config.tol * scale;

  auto residual = [&](const Field& U, double& rnorm) {
    rnorm = 0.0;
    // interface row
    for (int i = 1; i < nx - 1; ++i) {
      double du = U.at(i, 0) - field.at(i, 0);
      double dyu = (-3.0 * U.at(i, 0) + 4.0 * U.at(i, 1) - U.at(i, 2)) / (2.0 * hy);
      double r = -sigma_i * du + dyu - (wp[i] + wpp[i] * du) / eps;
      im.work[static_cast<size_t>(0) * m + (i - 1)] = r;
      rnorm = std::max(rnorm, std::fabs(r));
    }
    // bulk rows
    for (int j = 1; j < ny - 1; ++j) {
      const size_t row = static_cast<size_t>(j) * m;
      for (int i = 1; i < nx - 1; ++i) {
        double lap = sx * (U.at(i - 1, j) - 2.0 * U.at(i, j) + U.at(i + 1, j)) +
                     sy * (U.at(i, j - 1) - 2.0 * U.at(i, j) + U.at(i, j + 1));
        double r = -sigma_b * (U.at(i, j) - field.at(i, j)) + lap;
        im.work[row + (i - 1)] = r;
        rnorm = std::max(rnorm, std::fabs(r));
      }
    }
    // top row, homogeneous Neumann through the mirrored ghost
    {
      int j = ny - 1;
      const size_t row = static_cast<size_t>(j) * m;
      for (int i = 1; i < nx - 1; ++i) {
        double lap = sx * (U.at(i - 1, j) - 2.0 * U.at(i, j) + U.at(i + 1, j)) +
                     sy * (2.0 * U.at(i, j - 1) - 2.0 * U.at(i, j));
        double r = -sigma_b * (U.at(i, j) - field.at(i, j)) + lap;
        im.work[row + (i - 1)] = r;
        rnorm = std::max(rnorm, std::fabs(r));
      }
    }
  };

  double rnorm = 0.0;
  int iter = 0;
  double prev_rnorm = 1e300;
  int grew = 0;
  for (; iter < im.config.max_iter; ++iter) {
    residual(out, rnorm);
    if (!std::isfinite(rnorm))
      throw ConvergenceError("CoupledSolver::step: residual diverged");
    if (rnorm <= tol_abs) break;
    if (rnorm > prev_rnorm) {
      if (++grew > 3)
        throw ConvergenceError(
            "CoupledSolver::step: linear solve stalled, residual " +
            std::to_string(rnorm));
    }
    prev_rnorm = rnorm;
    im.fast_solve(dt);
    for (int j = 0; j < ny; ++j) {
      const size_t row = static_cast<size_t>(j) * m;
      for (int i = 1; i < nx - 1; ++i) out.at(i, j) += im.work[row + (i - 1)];
    }
  }
  if (rnorm > tol_abs)
    throw ConvergenceError("CoupledSolver::step: linear solve did not reach " +
                           std::to_string(tol_abs) + ", residual " +
                           std::to_string(rnorm));
  last_iterations_ = iter;
  return out;
}

Field step(const Field& field, double dt, const PotentialSpec& potential) {
  CoupledSolver solver(field, potential);
  return solver.step(field, dt);
}

SolutionRecord run(const RunConfig& config) {
  PotentialSpec potential = PotentialSpec::from_config(config.potential);
  LayerProfile layer = make_layer(config, potential);
  FieldGrid grid = resolve_grid(config);
  const double eps = config.epsilon;
  double dt = config.time.dt > 0.0 ? config.time.dt
                                   : config.solver.cfl_safety * eps * eps;
  const int steps = std::max(1, static_cast<int>(std::ceil(config.time.T / dt - 1e-12)));
  dt = config.time.T / steps;
  int cadence = config.time.snapshot_every > 0 ? config.time.snapshot_every
                                               : std::max(1, steps / 8);

  Field field = init_superposition(config.centers, eps, layer, grid, config.a);
  CoupledSolver solver(field, potential, config.solver);

  SolutionRecord rec;
  rec.config_hash = config.hash();
  rec.eps = eps;
  rec.a_exponent = config.a;
  rec.num_layers = static_cast<int>(config.centers.size());

  auto sample = [&](const Field& f) {
    rec.times.push_back(f.time);
    rec.traces.push_back(f.boundary_trace());
    rec.crossings.push_back(track_crossings(rec.traces.back(), rec.num_layers,
                                            -grid.Lx, grid.hx()));
    rec.energies.push_back(energy(f, potential));
    if (config.store_fields) rec.fields.push_back(f);
  };

  sample(field);
  for (int k = 1; k <= steps; ++k) {
    field = solver.step(field, dt);
    if (k % cadence == 0 || k == steps) sample(field);
  }
  return rec;
}

}  // namespace dislo
