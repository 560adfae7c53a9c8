// Command-line front end.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qvdp/classical.hpp"
#include "qvdp/config.hpp"
#include "qvdp/csv.hpp"
#include "qvdp/dynamics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/liouvillian.hpp"
#include "qvdp/spectrum.hpp"
#include "qvdp/steady.hpp"
#include "qvdp/sweep.hpp"

namespace {

using namespace qvdp;

constexpr const char* kUnits =
    "Rates (delta, kappa, gain, eta) share one inverse-time unit; times are in its inverse.";

struct PointFlags {
  double delta = 10.0;
  double kappa = 0.1;
  double gain = 1.0;
  double eta = 0.05;
  std::optional<double> eps;
  std::optional<double> eps_scaled;
  int dim = 0;
};

void add_point_flags(CLI::App* app, PointFlags& f, bool with_drive = true) {
  app->add_option("--delta", f.delta, "detuning Delta (rate unit)")->capture_default_str();
  app->add_option("--kappa", f.kappa, "single-photon loss kappa (rate unit)")->capture_default_str();
  app->add_option("--gain", f.gain, "linear gain g (rate unit)")->capture_default_str();
  app->add_option("--eta", f.eta, "two-photon loss eta (rate unit)")->capture_default_str();
  if (with_drive) {
    auto* e = app->add_option("--eps", f.eps, "raw drive amplitude eps (rate unit)");
    auto* s = app->add_option("--eps-scaled", f.eps_scaled, "drive eps*sqrt(eta) (rate unit)");
    e->excludes(s);
    s->excludes(e);
  }
  app->add_option("--dim", f.dim, "Fock truncation; 0 picks ceil(3 n_est + 20)")
      ->capture_default_str();
}

SystemParams resolve(const PointFlags& f) {
  SystemParams p;
  p.delta = f.delta;
  p.kappa = f.kappa;
  p.gain = f.gain;
  p.eta = f.eta;
  if (f.eps) p.eps = cplx(*f.eps, 0.0);
  if (f.eps_scaled) p.set_eps_scaled(*f.eps_scaled);
  p.dim = f.dim > 0 ? f.dim : default_dimension(p);
  p.validate();
  std::cout << "# " << p.describe() << '\n';
  return p;
}

struct SweepFlags {
  double delta = 10.0;
  double kappa = 0.1;
  double gain = 1.0;
  std::string eta = "0.02,0.05,0.1";
  std::string eps;
  std::string eps_scaled = "0:8:0.5";
  int dim = 0;
  int workers = 1;
  int grid_n = 201;
  double grid_radius = 0.0;
  std::string out = "out";
};

void add_sweep_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--delta", f.delta, "detuning Delta (rate unit)")->capture_default_str();
  app->add_option("--kappa", f.kappa, "single-photon loss kappa (rate unit)")->capture_default_str();
  app->add_option("--gain", f.gain, "linear gain g (rate unit)")->capture_default_str();
  app->add_option("--eta", f.eta, "eta values: comma list or start:stop:step")
      ->capture_default_str();
  auto* e = app->add_option("--eps", f.eps, "raw drive values (list or range)");
  auto* s = app->add_option("--eps-scaled", f.eps_scaled, "eps*sqrt(eta) values (list or range)")
                ->capture_default_str();
  e->excludes(s);
  s->excludes(e);
  app->add_option("--dim", f.dim, "Fock truncation; 0 is automatic per point")
      ->capture_default_str();
  app->add_option("--workers", f.workers, "parallel points")->capture_default_str();
  app->add_option("--grid-n", f.grid_n, "Husimi grid points per axis")->capture_default_str();
  app->add_option("--grid-radius", f.grid_radius, "Husimi grid half width; 0 is automatic")
      ->capture_default_str();
  app->add_option("--out", f.out, "output directory")->capture_default_str();
}

RunConfig sweep_config(const SweepFlags& f, Task task) {
  RunConfig c;
  c.delta = f.delta;
  c.kappa = f.kappa;
  c.gain = f.gain;
  c.eta = parse_real_list("eta", f.eta);
  if (!f.eps.empty()) {
    c.eps = parse_real_list("eps", f.eps);
    c.eps_scaled.clear();
  } else {
    c.eps_scaled = parse_real_list("eps_scaled", f.eps_scaled);
  }
  c.dim = f.dim;
  c.workers = f.workers;
  c.grid_n = f.grid_n;
  c.grid_radius = f.grid_radius;
  c.tasks = {task};
  c.validate();
  std::cout << "# delta=" << c.delta << " kappa=" << c.kappa << " gain=" << c.gain
            << " eta=" << f.eta << (f.eps.empty() ? " eps_scaled=" + f.eps_scaled : " eps=" + f.eps)
            << " dim=" << (c.dim ? std::to_string(c.dim) : std::string("auto")) << '\n';
  return c;
}

int report_sweep(const SweepReport& r, const std::string& out) {
  int failed = 0;
  for (const auto& p : r.points) failed += p.ok ? 0 : 1;
  std::cout << "points " << r.points.size() << " failed " << failed << " wall " << r.wall_seconds
            << " s, output in " << out << '\n';
  return failed ? 1 : 0;
}

void print_spectrum_summary(const SpectrumResult& s) {
  std::cout << "gap1 " << csv::format(s.gap1) << "\ngap2 " << csv::format(s.gap2)
            << "\nosc_freq " << csv::format(s.osc_freq) << "\nmetastability_ratio "
            << (s.metastability_ratio ? csv::format(*s.metastability_ratio) : "nan")
            << "\npartial " << (s.partial ? 1 : 0) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("Driven nonlinear cavity simulator. ") + kUnits};
  app.require_subcommand(1);

  PointFlags pf;

  auto* hopf = app.add_subcommand("hopf", "classical Hopf threshold in eps*sqrt(eta)");
  add_point_flags(hopf, pf, false);

  auto* spectrum = app.add_subcommand("spectrum", "Liouvillian eigenvalues at one point");
  add_point_flags(spectrum, pf);
  std::string method = "auto";
  int k = 12;
  std::string spectrum_out = "spectrum.csv";
  std::string matrix_out;
  spectrum->add_option("--method", method, "auto | dense | iterative | sectors")
      ->check(CLI::IsMember({"auto", "dense", "iterative", "sectors"}))
      ->capture_default_str();
  spectrum->add_option("--k", k, "eigenvalue count for the iterative method")->capture_default_str();
  spectrum->add_option("--out", spectrum_out, "CSV path")->capture_default_str();
  spectrum->add_option("--export-matrix", matrix_out, "write L as 'row col re im' lines");

  SweepFlags sf;
  auto* gaps = app.add_subcommand("gaps-sweep", "dissipative gaps over an (eta, eps) grid");
  add_sweep_flags(gaps, sf);
  auto* steady = app.add_subcommand("steady-sweep", "steady states over an (eta, eps) grid");
  add_sweep_flags(steady, sf);

  auto* evolve_cmd = app.add_subcommand("evolve", "master-equation dynamics from vacuum");
  add_point_flags(evolve_cmd, pf);
  double t_end = 40.0;
  double dt = 0.01;
  double rtol = 1e-8;
  double atol = 1e-10;
  bool no_q = false;
  std::vector<double> husimi_at_times;
  std::string evolve_out = "evolve.csv";
  evolve_cmd->add_option("--t-end", t_end, "final time")->capture_default_str();
  evolve_cmd->add_option("--dt", dt, "output sampling interval")->capture_default_str();
  evolve_cmd->add_option("--rtol", rtol, "relative tolerance")->capture_default_str();
  evolve_cmd->add_option("--atol", atol, "absolute tolerance")->capture_default_str();
  evolve_cmd->add_flag("--no-q-max", no_q, "skip the Husimi maximum column");
  evolve_cmd->add_option("--husimi-at", husimi_at_times, "write husimi_t<t>.csv at these times");
  evolve_cmd->add_option("--out", evolve_out, "CSV path")->capture_default_str();

  auto* cycle = app.add_subcommand("classical-cycle", "mean-field limit cycle");
  add_point_flags(cycle, pf);
  std::string cycle_out = "cycle.csv";
  std::string traj_out;
  cycle->add_option("--out", cycle_out, "CSV path")->capture_default_str();
  cycle->add_option("--trajectory", traj_out, "also write the transient from alpha = 0.1");
  cycle->add_option("--t-end", t_end, "transient length for --trajectory")->capture_default_str();

  auto* mc = app.add_subcommand("mc", "classical ensemble from vacuum noise");
  add_point_flags(mc, pf);
  int n_traj = 10000;
  std::uint64_t seed = 1;
  double t_query = 10.0;
  int workers = 1;
  int grid_n = 201;
  double grid_radius = 0.0;
  std::string mc_out = "ensemble.csv";
  std::string mc_husimi;
  mc->add_option("--n-traj", n_traj, "trajectory count")->capture_default_str();
  mc->add_option("--seed", seed, "RNG seed")->capture_default_str();
  mc->add_option("--t-query", t_query, "sampling time")->capture_default_str();
  mc->add_option("--workers", workers, "threads")->capture_default_str();
  mc->add_option("--grid-n", grid_n, "Husimi grid points per axis")->capture_default_str();
  mc->add_option("--grid-radius", grid_radius, "grid half width; 0 is automatic")
      ->capture_default_str();
  mc->add_option("--out", mc_out, "CSV path")->capture_default_str();
  mc->add_option("--husimi", mc_husimi, "also write the ensemble Husimi grid here");

  auto* pmap = app.add_subcommand("phase-map", "limit-cycle phase vs initial amplitude");
  add_point_flags(pmap, pf);
  int map_n = 81;
  double span = 8.0;
  std::string pmap_out = "phase_map.csv";
  pmap->add_option("--n", map_n, "grid points per axis")->capture_default_str();
  pmap->add_option("--span", span, "half width around the unstable fixed point")
      ->capture_default_str();
  pmap->add_option("--t-query", t_query, "evaluation time")->capture_default_str();
  pmap->add_option("--workers", workers, "threads")->capture_default_str();
  pmap->add_option("--out", pmap_out, "CSV path")->capture_default_str();

  auto* run = app.add_subcommand("run", "execute a config file (key=value or JSON)");
  std::string config_path;
  std::string run_out = "out";
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", run_out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hopf) {
      const SystemParams p = resolve(pf);
      std::printf("%.5g\n", hopf_threshold(p));
      return 0;
    }
    if (*spectrum) {
      const SystemParams p = resolve(pf);
      SpectrumResult s;
      if (method == "sectors") {
        SpectrumOptions so;
        s = analyze_spectrum(sector_spectrum(p), resolve_tol_imag(so, p), so.tol_zero, false);
      } else {
        const Superoperator l = build_superoperator(p);
        if (!matrix_out.empty()) {
          std::ofstream mo(matrix_out);
          if (!mo) throw Error(Errc::io, "cannot open " + matrix_out);
          l.write_coordinates(mo);
        }
        const bool dense = method == "dense" || (method == "auto" && p.dim <= 40);
        s = dense ? full_spectrum(l) : rightmost_eigenvalues(l, k);
      }
      csv::write_spectrum(spectrum_out, s);
      print_spectrum_summary(s);
      return 0;
    }
    if (*gaps || *steady) {
      const RunConfig c = sweep_config(sf, *gaps ? Task::gaps : Task::steady);
      SweepOptions so;
      so.out_dir = sf.out;
      return report_sweep(run_sweep(c, so), sf.out);
    }
    if (*evolve_cmd) {
      const SystemParams p = resolve(pf);
      EvolveOptions eo;
      eo.ode.rtol = rtol;
      eo.ode.atol = atol;
      eo.record_q_max = !no_q;
      eo.q_grid.n = 41;
      eo.snapshot_times = husimi_at_times;
      const int count = static_cast<int>(std::llround(t_end / dt)) + 1;
      auto times = uniform_times(0.0, t_end, count);
      for (const double t : husimi_at_times) times.push_back(t);
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      const auto rec = evolve(p, fock_state(0, p.dim), times, eo);
      csv::write_evolve(evolve_out, rec);
      for (const auto& [t, rho] : rec.snapshots) {
        csv::write_husimi("husimi_t" + csv::format(t) + ".csv", husimi(rho, GridSpec{}));
      }
      std::cout << "steps " << rec.accepted_steps << " final N " << rec.n_photon.back() << '\n';
      return 0;
    }
    if (*cycle) {
      const SystemParams p = resolve(pf);
      const LimitCycle lc = limit_cycle(p);
      csv::write_cycle(cycle_out, lc);
      if (!traj_out.empty()) {
        csv::write_trajectory(traj_out,
                              integrate(cplx(0.1, 0.0), p, uniform_times(0.0, t_end,
                                        static_cast<int>(t_end / 0.01) + 1)));
      }
      std::cout << "period " << csv::format(lc.period) << "\nfreq " << csv::format(lc.freq)
                << "\nradius " << csv::format(lc.mean_radius) << "\nfloquet "
                << csv::format(lc.floquet_multiplier) << '\n';
      return 0;
    }
    if (*mc) {
      const SystemParams p = resolve(pf);
      EnsembleOptions eo;
      eo.workers = workers;
      const auto ens = mc_ensemble(p, n_traj, seed, t_query, eo);
      csv::write_ensemble(mc_out, ens);
      if (!mc_husimi.empty()) {
        csv::write_husimi(mc_husimi, classical_husimi(ens, GridSpec{grid_n, grid_radius, {}}));
      }
      std::cout << "samples " << ens.samples_t.size() << '\n';
      return 0;
    }
    if (*pmap) {
      const SystemParams p = resolve(pf);
      const cplx c = fixed_point(p).alpha;
      std::vector<double> re0(map_n), im0(map_n);
      for (int i = 0; i < map_n; ++i) {
        const double x = -span + 2.0 * span * i / (map_n - 1);
        re0[i] = c.real() + x;
        im0[i] = c.imag() + x;
      }
      PhaseMapOptions po;
      po.workers = workers;
      const PhaseMap m = phase_map(p, re0, im0, t_query, po);
      csv::write_phase_map(pmap_out, m);
      std::cout << "singular cells " << m.singular.sum() << '\n';
      return 0;
    }
    if (*run) {
      SweepOptions so;
      so.out_dir = run_out;
      const RunConfig c = load_config(config_path);
      std::cout << "# " << c.to_json().dump() << '\n';
      return report_sweep(run_sweep(c, so), run_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
