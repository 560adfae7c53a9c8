#include "qvdp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qvdp/error.hpp"
#include "qvdp/liouvillian.hpp"

namespace qvdp {

std::vector<double> uniform_times(double t0, double t1, int count) {
  if (count < 2) return {t0};
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = t0 + (t1 - t0) * i / (count - 1);
  return t;
}

EvolutionRecord evolve(const SystemParams& p, const DensityMatrix& rho0,
                       const std::vector<double>& t_grid, const EvolveOptions& opts) {
  p.validate();
  if (rho0.dim() != p.dim) {
    throw Error(Errc::dimension_mismatch, "initial state dim does not match params.dim");
  }
  if (t_grid.empty()) throw Error(Errc::invalid_parameter, "empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw Error(Errc::invalid_parameter, "time grid must be strictly increasing");
    }
  }
  const auto diag = validate_density(rho0);
  if (!diag.ok()) {
    std::ostringstream os;
    os << "initial state invalid (trace err " << diag.trace_error << ", hermiticity err "
       << diag.hermiticity_error << ", min eig " << diag.min_eigenvalue << ")";
    throw Error(Errc::invalid_parameter, os.str());
  }

  const Operator a = annihilation(p.dim);
  auto rhs = [&p](double, const CMatrix& rho) { return qvdp::apply(p, rho); };
  auto stepper = make_dormand_prince<CMatrix>(rhs, opts.ode);

  EvolutionRecord rec;
  CMatrix rho = rho0.m;
  double t = std::min(0.0, t_grid.front());
  std::size_t next_snapshot = 0;
  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());

  for (const double t_out : t_grid) {
    if (opts.hermitize_each_step) {
      // Advance roughly one controller step at a time and project the
      // accepted state; the cached derivative is recomputed afterwards.
      while (t < t_out) {
        const double before = t;
        const double target = std::min(t_out, t + std::max(stepper.step_size(), 1e-12));
        stepper.advance(t, rho, target);
        rho = 0.5 * (rho + rho.adjoint());
        const cplx tr = rho.trace();
        rho /= tr;
        stepper.invalidate();
        if (t == before) break;
      }
    } else {
      stepper.advance(t, rho, t_out);
    }

    const DensityMatrix state{rho};
    const double err = std::abs(rho.trace() - 1.0);
    if (err > opts.trace_tolerance) {
      std::ostringstream os;
      os << "|Tr rho - 1| = " << err << " at t=" << t_out << " (step " << stepper.step_size()
         << ")";
      throw Error(Errc::trace_drift, os.str());
    }
    const double n = photon_number(state);
    rec.times.push_back(t_out);
    rec.n_photon.push_back(n);
    rec.n_rescaled.push_back(p.eta * n);
    rec.var_n.push_back(photon_var(state));
    rec.purity.push_back(purity(state));
    rec.trace_err.push_back(err);
    rec.a_mean.push_back(expectation(a, state));
    if (opts.record_q_max) {
      rec.q_max.push_back(q_max(hermitize(state), opts.q_grid).value);
    }
    while (next_snapshot < snaps.size() && snaps[next_snapshot] <= t_out + 1e-12) {
      if (std::abs(snaps[next_snapshot] - t_out) <= 1e-9 * std::max(1.0, std::abs(t_out))) {
        rec.snapshots.emplace_back(t_out, state);
      }
      ++next_snapshot;
    }
  }
  rec.final_state = DensityMatrix{rho};
  rec.accepted_steps = stepper.accepted_steps();
  return rec;
}

double purity_plateau(const EvolutionRecord& record, double t_center, double period) {
  const double lo = t_center - 0.5 * period;
  const double hi = t_center + 0.5 * period;
  const auto& t = record.times;
  if (t.size() < 2 || t.front() > lo + 1e-12 || t.back() < hi - 1e-12) {
    throw Error(Errc::insufficient_data, "record does not cover the plateau window");
  }
  auto value_at = [&](double x) {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return record.purity.front();
    if (it == t.end()) return record.purity.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * record.purity[i - 1] + w * record.purity[i];
  };
  if (period <= 0.0) return value_at(t_center);
  // Trapezoid over the window with its endpoints interpolated.
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(lo, value_at(lo));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > lo && t[i] < hi) pts.emplace_back(t[i], record.purity[i]);
  }
  pts.emplace_back(hi, value_at(hi));
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    acc += 0.5 * (pts[i].second + pts[i - 1].second) * (pts[i].first - pts[i - 1].first);
  }
  return acc / (hi - lo);
}

std::optional<double> oscillation_period(const std::vector<double>& times,
                                         const std::vector<double>& values, double t0, double t1) {
  std::vector<double> t, v;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t0 && times[i] <= t1) {
      t.push_back(times[i]);
      v.push_back(values[i]);
    }
  }
  if (t.size() < 4) return std::nullopt;
  // Least-squares linear trend.
  const double n = static_cast<double>(t.size());
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sv += v[i];
    stt += t[i] * t[i];
    stv += t[i] * v[i];
  }
  const double den = n * stt - st * st;
  const double slope = den != 0.0 ? (n * stv - st * sv) / den : 0.0;
  const double icpt = (sv - slope * st) / n;
  std::vector<double> crossings;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = v[i - 1] - (icpt + slope * t[i - 1]);
    const double b = v[i] - (icpt + slope * t[i]);
    if (a < 0.0 && b >= 0.0) {
      crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
    }
  }
  if (crossings.size() < 2) return std::nullopt;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

}  // namespace qvdp
