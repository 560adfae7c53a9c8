#include "qvdp/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "qvdp/classical.hpp"
#include "qvdp/csv.hpp"
#include "qvdp/dynamics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/log.hpp"
#include "qvdp/parallel.hpp"

#ifndef QVDP_VERSION
#define QVDP_VERSION "0.0.0"
#endif

namespace qvdp {

namespace fs = std::filesystem;

namespace {

const double kNan = std::nan("");

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GapsRow run_gaps(const SweepPoint& pt, const SweepOptions& opts, const fs::path& dir,
                 std::vector<std::string>& files, const std::string& rel) {
  const Superoperator l = build_superoperator(pt.params);
  const SpectrumResult spec = pt.params.dim <= opts.dense_limit
                                  ? full_spectrum(l)
                                  : rightmost_eigenvalues(l, opts.rightmost_k);
  csv::write_spectrum(dir / "spectrum.csv", spec);
  files.push_back(rel + "/spectrum.csv");
  GapsRow row;
  row.gap1 = spec.gap1;
  row.gap2 = spec.gap2;
  row.osc_freq = spec.osc_freq;
  row.metastability_ratio = spec.metastability_ratio.value_or(kNan);
  row.partial = spec.partial;
  return row;
}

SteadyRow run_steady(const SweepPoint& pt, const RunConfig& cfg, const fs::path& dir,
                     std::vector<std::string>& files, const std::string& rel) {
  const Superoperator l = build_superoperator(pt.params);
  const SteadyState ss = steady_state(l);
  SteadyRow row;
  row.obs = ss.observables;
  row.residual = ss.residual;
  row.suggested_dim = ss.suggested_dim;
  const GridSpec spec{cfg.grid_n, cfg.grid_radius, {0.0, 0.0}};
  const QGrid grid = husimi(ss.rho, spec);
  const QMax qm = refine_max(grid, [&](cplx a) { return husimi_at(ss.rho, a); });
  row.q_max = qm.value;
  row.q_argmax = qm.argmax;
  csv::write_husimi(dir / "steady_husimi.csv", grid);
  csv::write_distribution(dir / "steady_distribution.csv", ss.observables.distribution);
  files.push_back(rel + "/steady_husimi.csv");
  files.push_back(rel + "/steady_distribution.csv");
  return row;
}

void run_evolve(const SweepPoint& pt, const RunConfig& cfg, const SweepOptions& opts,
                const fs::path& dir, std::vector<std::string>& files, const std::string& rel) {
  EvolveOptions eo;
  eo.ode.rtol = cfg.rtol;
  eo.ode.atol = cfg.atol;
  eo.record_q_max = true;
  eo.q_grid.n = opts.evolve_q_grid;
  const int count = static_cast<int>(std::llround(cfg.t_end / opts.evolve_dt)) + 1;
  const auto rec = evolve(pt.params, fock_state(0, pt.params.dim),
                          uniform_times(0.0, cfg.t_end, count), eo);
  csv::write_evolve(dir / "evolve.csv", rec);
  files.push_back(rel + "/evolve.csv");
}

ClassicalRow run_classical(const SweepPoint& pt, const RunConfig& cfg, const fs::path& dir,
                           std::vector<std::string>& files, const std::string& rel) {
  ClassicalRow row;
  const SystemParams& p = pt.params;
  row.hopf_threshold = p.gain >= p.kappa ? hopf_threshold(p) : kNan;
  const FixedPoint fp = fixed_point(p);
  row.fixed_point = fp.alpha;
  row.fixed_stable = fp.stable;
  row.period = kNan;
  row.freq = kNan;
  if (!fp.stable && p.gain > p.kappa) {
    try {
      const LimitCycle lc = limit_cycle(p);
      row.limit_cycle = true;
      row.period = lc.period;
      row.freq = lc.freq;
      csv::write_cycle(dir / "cycle.csv", lc);
      files.push_back(rel + "/cycle.csv");
    } catch (const Error& e) {
      if (e.code() != Errc::not_in_limit_cycle) throw;
    }
  }
  EnsembleOptions eo;
  eo.ode.rtol = std::min(cfg.rtol, 1e-10);
  eo.ode.atol = std::min(cfg.atol, 1e-12);
  const ClassicalEnsemble ens = mc_ensemble(p, cfg.n_traj, cfg.seed, cfg.t_end, eo);
  csv::write_ensemble(dir / "ensemble.csv", ens);
  csv::write_husimi(dir / "ensemble_husimi.csv",
                    classical_husimi(ens, GridSpec{cfg.grid_n, cfg.grid_radius, {0.0, 0.0}}));
  files.push_back(rel + "/ensemble.csv");
  files.push_back(rel + "/ensemble_husimi.csv");
  return row;
}

std::string flag(bool b) { return b ? "1" : "0"; }

void write_merged(const RunConfig& cfg, const SweepReport& report, const fs::path& out) {
  auto has = [&](Task t) {
    return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end();
  };
  if (has(Task::gaps)) {
    csv::Writer w(out / "gaps.csv", csv::kGapsHeader);
    for (const auto& r : report.points) {
      if (!r.gaps) continue;
      const auto& g = *r.gaps;
      w.row({csv::format(r.point.params.eta), csv::format(r.point.eps_scaled), csv::format(g.gap1),
             csv::format(g.gap2), csv::format(g.osc_freq), csv::format(g.metastability_ratio),
             flag(g.partial)});
    }
  }
  if (has(Task::steady)) {
    csv::Writer w(out / "steady.csv", csv::kSteadyHeader);
    for (const auto& r : report.points) {
      if (!r.steady) continue;
      const auto& s = *r.steady;
      w.row({r.point.params.eta, r.point.eps_scaled, static_cast<double>(r.point.params.dim),
             s.obs.n_photon, s.obs.var_n, s.obs.purity, s.obs.fluct_eta_sigma,
             s.obs.fluct_eta2_var, s.residual, s.q_max, s.q_argmax.real(), s.q_argmax.imag()});
    }
  }
  if (has(Task::classical)) {
    csv::Writer w(out / "classical.csv", csv::kClassicalHeader);
    for (const auto& r : report.points) {
      if (!r.classical) continue;
      const auto& c = *r.classical;
      w.row({csv::format(r.point.params.eta), csv::format(r.point.eps_scaled),
             csv::format(c.hopf_threshold), flag(c.limit_cycle), csv::format(c.period),
             csv::format(c.freq), csv::format(c.fixed_point.real()),
             csv::format(c.fixed_point.imag()), flag(c.fixed_stable)});
    }
  }
}

void write_manifest(const RunConfig& cfg, const SweepReport& report, const SweepOptions& opts) {
  nlohmann::json m;
  m["version"] = library_version();
  m["schema_version"] = kCsvSchemaVersion;
  m["config"] = cfg.to_json();
  m["solver"] = {{"dense_limit", opts.dense_limit},
                 {"rightmost_k", opts.rightmost_k},
                 {"evolve_dt", opts.evolve_dt},
                 {"evolve_q_grid", opts.evolve_q_grid}};
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["created_utc"] = stamp;
  m["wall_seconds"] = report.wall_seconds;
  m["all_ok"] = report.all_ok();
  nlohmann::json headers;
  auto join = [](const std::vector<std::string>& h) {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + h[i];
    return s;
  };
  headers["gaps.csv"] = join(csv::kGapsHeader);
  headers["steady.csv"] = join(csv::kSteadyHeader);
  headers["classical.csv"] = join(csv::kClassicalHeader);
  headers["spectrum.csv"] = join(csv::kSpectrumHeader);
  headers["evolve.csv"] = join(csv::kEvolveHeader);
  headers["husimi"] = join(csv::kHusimiHeader);
  headers["ensemble.csv"] = join(csv::kEnsembleHeader);
  headers["steady_distribution.csv"] = join(csv::kDistributionHeader);
  headers["cycle.csv"] = "period=<T>,freq=<f> then " + join(csv::kCycleHeader);
  m["csv_headers"] = headers;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& r : report.points) {
    nlohmann::json j;
    j["eta"] = r.point.params.eta;
    j["eps_scaled"] = r.point.eps_scaled;
    j["eps"] = r.point.params.eps.real();
    j["dim"] = r.point.params.dim;
    j["ok"] = r.ok;
    if (!r.ok) j["error"] = r.error;
    j["wall_seconds"] = r.wall_seconds;
    j["files"] = r.files;
    if (r.steady && r.steady->suggested_dim) j["suggested_dim"] = *r.steady->suggested_dim;
    pts.push_back(j);
  }
  m["points"] = pts;
  std::ofstream out(opts.out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write manifest in " + opts.out_dir.string());
  out << m.dump(2) << '\n';
}

}  // namespace

std::string_view library_version() { return QVDP_VERSION; }

bool SweepReport::all_ok() const {
  return std::all_of(points.begin(), points.end(), [](const PointResult& r) { return r.ok; });
}

std::string point_tag(const SweepPoint& pt) {
  return "eta_" + csv::format(pt.params.eta) + "__es_" + csv::format(pt.eps_scaled);
}

SweepReport run_sweep(const RunConfig& config, const SweepOptions& opts) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(opts.out_dir);
  SweepReport report;
  for (const auto& pt : config.points()) {
    PointResult r;
    r.point = pt;
    report.points.push_back(std::move(r));
  }

  parallel_for(report.points.size(), config.workers, [&](std::size_t i) {
    PointResult& r = report.points[i];
    const auto start = std::chrono::steady_clock::now();
    const std::string rel = "points/" + point_tag(r.point);
    const fs::path dir = opts.out_dir / rel;
    try {
      fs::create_directories(dir);
      for (const Task t : config.tasks) {
        switch (t) {
          case Task::gaps: r.gaps = run_gaps(r.point, opts, dir, r.files, rel); break;
          case Task::steady: r.steady = run_steady(r.point, config, dir, r.files, rel); break;
          case Task::evolve: run_evolve(r.point, config, opts, dir, r.files, rel); break;
          case Task::classical:
            r.classical = run_classical(r.point, config, dir, r.files, rel);
            break;
        }
      }
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
      warn("point " + point_tag(r.point) + " failed: " + r.error);
    }
    r.wall_seconds = seconds_since(start);
  });

  report.wall_seconds = seconds_since(t0);
  write_merged(config, report, opts.out_dir);
  write_manifest(config, report, opts);
  return report;
}

int run_config(const fs::path& config_path, const SweepOptions& opts) {
  const RunConfig cfg = load_config(config_path);
  return run_sweep(cfg, opts).all_ok() ? 0 : 1;
}

}  // namespace qvdp
