#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qvdp/fock.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/ode.hpp"

namespace qvdp {

struct EvolveOptions {
  OdeOptions ode;
  // Replace rho by its Hermitian part (and renormalize the trace) after
  // every accepted step. Off by default so that trace_err measures the raw
  // integration drift.
  bool hermitize_each_step = false;
  bool record_q_max = false;
  GridSpec q_grid{81, 0.0, {0.0, 0.0}};
  std::vector<double> snapshot_times;  // each must also be in t_grid
  double trace_tolerance = 1e-6;
};

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<double> n_photon;
  std::vector<double> n_rescaled;  // eta * N
  std::vector<double> var_n;
  std::vector<double> purity;
  std::vector<double> q_max;  // empty unless requested
  std::vector<double> trace_err;
  std::vector<cplx> a_mean;  // <a>
  std::vector<std::pair<double, DensityMatrix>> snapshots;
  DensityMatrix final_state;
  long long accepted_steps = 0;
};

/// Integrates d rho/dt = apply(rho) with Dormand-Prince 5(4) and records
/// observables at every time in `t_grid` (increasing, starting at or after
/// t = 0 of rho0). Throws Errc::trace_drift when |Tr rho - 1| exceeds the
/// tolerance and Errc::step_underflow when the controller fails.
EvolutionRecord evolve(const SystemParams& p, const DensityMatrix& rho0,
                       const std::vector<double>& t_grid, const EvolveOptions& opts = {});

/// Mean purity over [t_center - period/2, t_center + period/2] by
/// trapezoidal quadrature on the recorded samples.
double purity_plateau(const EvolutionRecord& record, double t_center, double period);

/// Mean spacing of upward crossings of `values` through their linear trend
/// on [t0, t1]. Empty when fewer than two crossings exist.
std::optional<double> oscillation_period(const std::vector<double>& times,
                                         const std::vector<double>& values, double t0, double t1);

std::vector<double> uniform_times(double t0, double t1, int count);

}  // namespace qvdp
