#include "dislo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dislo/errors.hpp"
#include "dislo/layer.hpp"

namespace dislo {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

void ExperimentConfig::validate() const {
  if (eps_list.empty()) throw ConfigError("sweep: empty eps list");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("sweep: eps list must be strictly decreasing");
  for (size_t i = 1; i < delta_list.size(); ++i)
    if (!(delta_list[i] < delta_list[i - 1]))
      throw ConfigError("sweep: delta list must be strictly decreasing");
  for (double e : eps_list) {
    RunConfig rc = base;
    rc.epsilon = e;
    FieldGrid g = resolve_grid(rc);
    if (g.hx() > e / 8.0 * (1.0 + 1e-9))
      throw ConfigError("sweep: configured grid cannot resolve eps");
  }
}

ExperimentConfig load_experiment_config(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw FormatError("cannot open experiment config: " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw FormatError("experiment config parse error: " + std::string(e.what()));
  }
  ExperimentConfig cfg;
  cfg.scenario = j.value("scenario", cfg.scenario);
  if (j.contains("eps_list")) cfg.eps_list = j["eps_list"].get<std::vector<double>>();
  if (j.contains("delta_list"))
    cfg.delta_list = j["delta_list"].get<std::vector<double>>();
  cfg.crossing_tol_eps_multiple =
      j.value("crossing_tol_eps_multiple", cfg.crossing_tol_eps_multiple);
  cfg.band_y0 = j.value("band_y0", cfg.band_y0);
  cfg.bulk_tol_at_min_eps = j.value("bulk_tol_at_min_eps", cfg.bulk_tol_at_min_eps);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("base")) {
    // Reuse the run-config parser on the nested object.
    std::string tmp = (fs::temp_directory_path() / "dislo_base_cfg.json").string();
    std::ofstream out(tmp);
    out << j["base"].dump();
    out.close();
    cfg.base = load_run_config(tmp);
  }
  return cfg;
}

CsvTable ConvergenceTable::to_csv() const {
  CsvTable t;
  size_t ncross = 0;
  for (const auto& r : rows) ncross = std::max(ncross, r.crossing_errors.size());
  t.header = {"eps", "time"};
  for (size_t i = 1; i <= ncross; ++i)
    t.header.push_back("err_" + std::to_string(i));
  t.header.push_back("bulk_sup_error");
  t.header.push_back("flagged");
  for (const auto& r : rows) {
    std::vector<double> row = {r.eps, r.time};
    for (size_t i = 0; i < ncross; ++i)
      row.push_back(i < r.crossing_errors.size() ? r.crossing_errors[i] : -1.0);
    row.push_back(r.bulk_sup_error);
    row.push_back(r.flagged ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<ConvergenceRow> compare_ode_pde(const SolutionRecord& record,
                                            const ParticleTrajectory& trajectory,
                                            double eps_multiple) {
  if (trajectory.delta() != 0.0)
    throw DomainError("compare_ode_pde: need the unperturbed trajectory");
  if (trajectory.num_particles() != record.num_layers)
    throw DomainError("compare_ode_pde: crossing count mismatch");
  std::vector<ConvergenceRow> rows;
  for (size_t k = 0; k < record.times.size(); ++k) {
    ConvergenceRow row;
    row.eps = record.eps;
    row.time = record.times[k];
    std::vector<double> z = trajectory.positions(row.time);
    for (int i = 0; i < record.num_layers; ++i)
      row.crossing_errors.push_back(std::fabs(record.crossings[k][i] - z[i]));
    row.flagged = *std::max_element(row.crossing_errors.begin(),
                                    row.crossing_errors.end()) >
                  eps_multiple * record.eps;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConvergenceRow> bulk_limit_check(const SolutionRecord& record,
                                             const ParticleTrajectory& trajectory,
                                             double band_y0) {
  if (record.fields.empty())
    throw DomainError("bulk_limit_check: record carries no field snapshots");
  const FieldGrid& g = record.fields.front().grid;
  if (!(band_y0 >= 4.0 * g.hx()))
    throw DomainError("bulk_limit_check: band_y0 must be >= 4 hx");

  std::vector<ConvergenceRow> rows;
  for (const Field& f : record.fields) {
    ConvergenceRow row;
    row.eps = record.eps;
    row.time = f.time;
    std::vector<double> z = trajectory.positions(f.time);
    double sup = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      double y = g.y(j);
      if (y < band_y0) continue;
      for (int i = 0; i < g.nx; ++i) {
        double target = 0.0;
        for (double zi : z)
          target += (kPi / 2.0 + std::atan((g.x(i) - zi) / y)) / kPi;
        sup = std::max(sup, std::fabs(f.at(i, j) - target));
      }
    }
    row.bulk_sup_error = sup;
    rows.push_back(std::move(row));
  }
  return rows;
}

Report envelope_check(const std::vector<EpsTrace>& traces,
                      const ParticleTrajectory& trajectory, double t) {
  Report rep;
  rep.title = "boundary envelope limit";
  if (traces.empty()) throw DomainError("envelope_check: no traces");
  std::vector<double> z = trajectory.positions(t);
  const int N = trajectory.num_particles();

  std::vector<double> plateau_dev;
  for (const EpsTrace& tr : traces) {
    auto value_at = [&](double x) {
      double s = (x - tr.x_left) / tr.hx;
      int i = std::clamp(static_cast<int>(s), 0,
                         static_cast<int>(tr.trace.size()) - 2);
      double f = s - i;
      return (1.0 - f) * tr.trace[i] + f * tr.trace[i + 1];
    };
    // Plateau points: midpoints between consecutive centers plus one point
    // outside each end at the same margin.
    double worst = 0.0;
    double worst_tol = 0.0;
    auto probe = [&](double x, int level) {
      double m = 1e300;
      for (double zi : z) m = std::min(m, std::fabs(x - zi));
      double tol = 3.0 * N * tr.eps / (kPi * m);
      double dev = std::fabs(value_at(x) - level);
      if (dev - tol > worst - worst_tol) {
        worst = dev;
        worst_tol = tol;
      }
      return dev;
    };
    double mid_dev = 0.0;
    for (int i = 0; i + 1 < N; ++i)
      mid_dev = std::max(mid_dev, probe(0.5 * (z[i] + z[i + 1]), i + 1));
    if (N >= 1) {
      double m_out = N >= 2 ? 0.5 * (z[1] - z[0]) : 1.0;
      probe(z[0] - m_out, 0);
      probe(z[N - 1] + m_out, N);
      if (N == 1) mid_dev = std::max(probe(z[0] - 1.0, 0), probe(z[0] + 1.0, 1));
    }
    plateau_dev.push_back(mid_dev);
    std::ostringstream name;
    name << "plateau deviation within tail tolerance (eps=" << tr.eps << ")";
    rep.add_le(name.str(), worst, worst_tol + 1e-12);

    // Envelope band at each center.
    double band_viol = 0.0;
    for (int i = 0; i < N; ++i) {
      double v = value_at(z[i]);
      band_viol = std::max({band_viol, (i + 0.0) - v - 0.0, v - (i + 1.0)});
    }
    std::ostringstream name2;
    name2 << "center values inside [i-1, i] band (eps=" << tr.eps << ")";
    rep.add_le(name2.str(), band_viol, 1e-9);
  }

  double worst_increase = 0.0;
  for (size_t i = 1; i < plateau_dev.size(); ++i)
    worst_increase = std::max(worst_increase, plateau_dev[i] - plateau_dev[i - 1]);
  rep.add_le("plateau deviation non-increasing along sweep", worst_increase,
             1e-12);
  return rep;
}

namespace {

struct EntryOutput {
  SolutionRecord record;
  std::vector<ConvergenceRow> crossing_rows;
  std::vector<ConvergenceRow> bulk_rows;
  std::string error;  // nonempty when the run failed
};

EntryOutput run_entry(const ExperimentConfig& cfg, double eps,
                      const ParticleTrajectory& ode, const std::string& dir) {
  EntryOutput out;
  try {
    RunConfig rc = cfg.base;
    rc.epsilon = eps;
    rc.scenario = cfg.scenario;
    out.record = run(rc);

    out.crossing_rows =
        compare_ode_pde(out.record, ode, cfg.crossing_tol_eps_multiple);
    out.bulk_rows = bulk_limit_check(out.record, ode, cfg.band_y0);

    fs::create_directories(dir);
    CsvTable crossings;
    crossings.header = {"t"};
    for (int i = 1; i <= out.record.num_layers; ++i)
      crossings.header.push_back("x_" + std::to_string(i));
    for (size_t k = 0; k < out.record.times.size(); ++k) {
      std::vector<double> row = {out.record.times[k]};
      for (double c : out.record.crossings[k]) row.push_back(c);
      crossings.rows.push_back(std::move(row));
    }
    write_csv(dir + "/crossings.csv", crossings);

    CsvTable en;
    en.header = {"t", "E"};
    for (size_t k = 0; k < out.record.times.size(); ++k)
      en.rows.push_back({out.record.times[k], out.record.energies[k]});
    write_csv(dir + "/energy.csv", en);

    for (size_t k = 0; k < out.record.fields.size(); ++k) {
      const Field& f = out.record.fields[k];
      std::ostringstream base;
      base << dir << "/snapshot_" << k;
      write_field_binary(base.str(), f.values, f.grid.nx, f.grid.ny, f.grid.Lx,
                         f.grid.Ly, f.eps, f.a_exponent, f.time);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);

  PotentialSpec potential = PotentialSpec::from_config(config.base.potential);
  LayerProfile layer = make_layer(config.base, potential);
  auto [c0, alpha] = compute_constants(layer, potential);
  (void)alpha;

  ParticleState init{config.base.centers, 0.0};
  double T = config.base.time.T;
  ParticleTrajectory ode =
      integrate(init, c0, 0.0, Orientation::None, T, 1e-10);

  std::vector<EntryOutput> outputs(config.eps_list.size());
  auto entry_dir = [&](double eps) {
    std::ostringstream os;
    os << config.out_dir << "/eps_" << eps;
    return os.str();
  };
  if (config.threads > 1) {
    std::vector<std::future<EntryOutput>> futs;
    for (double eps : config.eps_list)
      futs.push_back(std::async(std::launch::async, run_entry, std::cref(config),
                                eps, std::cref(ode), entry_dir(eps)));
    for (size_t i = 0; i < futs.size(); ++i) outputs[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < config.eps_list.size(); ++i)
      outputs[i] = run_entry(config, config.eps_list[i], ode,
                             entry_dir(config.eps_list[i]));
  }

  SweepResult result;
  result.out_dir = config.out_dir;
  result.summary.title = "sweep " + config.scenario;

  std::vector<double> final_cross_err, final_bulk_err;
  std::vector<EpsTrace> final_traces;
  for (size_t i = 0; i < outputs.size(); ++i) {
    EntryOutput& o = outputs[i];
    if (!o.error.empty()) {
      result.summary.add("run eps=" + std::to_string(config.eps_list[i]), false,
                         0.0, 0.0, o.error);
      continue;
    }
    for (auto& r : o.crossing_rows) result.table.rows.push_back(r);
    for (size_t k = 0; k < o.bulk_rows.size(); ++k) {
      // merge bulk errors into the matching crossing rows
      for (auto& r : result.table.rows)
        if (r.eps == o.bulk_rows[k].eps && r.time == o.bulk_rows[k].time)
          r.bulk_sup_error = o.bulk_rows[k].bulk_sup_error;
    }
    double ce = 0.0;
    for (double e : o.crossing_rows.back().crossing_errors) ce = std::max(ce, e);
    final_cross_err.push_back(ce);
    final_bulk_err.push_back(o.bulk_rows.back().bulk_sup_error);

    const FieldGrid g = o.record.fields.front().grid;
    final_traces.push_back(
        {o.record.eps, -g.Lx, g.hx(), o.record.traces.back()});

    std::ostringstream nm;
    nm << "crossing error <= " << config.crossing_tol_eps_multiple
       << "*eps at eps=" << config.eps_list[i];
    result.summary.add_le(nm.str(), ce,
                          config.crossing_tol_eps_multiple * config.eps_list[i]);

    // energy must be non-increasing within the tolerance band
    double worst_rise = 0.0;
    for (size_t k = 1; k < o.record.energies.size(); ++k)
      worst_rise = std::max(
          worst_rise, o.record.energies[k] - o.record.energies[k - 1]);
    std::ostringstream nm2;
    nm2 << "energy non-increasing at eps=" << config.eps_list[i];
    result.summary.add_le(nm2.str(), worst_rise,
                          1e-6 * o.record.energies.front());
  }

  if (final_cross_err.size() == config.eps_list.size() &&
      final_cross_err.size() >= 2) {
    // crossing errors non-increasing, one <=20% inversion tolerated
    int inversions = 0;
    double worst = 0.0;
    for (size_t i = 1; i < final_cross_err.size(); ++i) {
      if (final_cross_err[i] > final_cross_err[i - 1]) {
        ++inversions;
        worst = std::max(worst, final_cross_err[i] / final_cross_err[i - 1] - 1.0);
      }
    }
    bool mono_ok = inversions == 0 || (inversions == 1 && worst <= 0.2);
    result.summary.add("crossing error decreasing along sweep", mono_ok,
                       static_cast<double>(inversions), 1.0);
    double worst_bulk_rise = 0.0;
    for (size_t i = 1; i < final_bulk_err.size(); ++i)
      worst_bulk_rise =
          std::max(worst_bulk_rise, final_bulk_err[i] - final_bulk_err[i - 1]);
    result.summary.add_le("bulk sup-error decreasing along sweep",
                          worst_bulk_rise, 0.0);
    result.summary.add_le("bulk sup-error at smallest eps",
                          final_bulk_err.back(), config.bulk_tol_at_min_eps);
    // fitted constant in error <= C sqrt(eps)
    double C = 0.0;
    for (size_t i = 0; i < final_bulk_err.size(); ++i)
      C = std::max(C, final_bulk_err[i] / std::sqrt(config.eps_list[i]));
    result.summary.add("fitted C in bulk error <= C sqrt(eps)", true, C, 0.0);

    Report env = envelope_check(final_traces, ode, T);
    for (const auto& line : env.checks) result.summary.checks.push_back(line);
  }

  write_csv(config.out_dir + "/convergence.csv", result.table.to_csv());
  write_text_file(config.out_dir + "/summary.json", result.summary.to_json());
  return result;
}

}  // namespace dislo
