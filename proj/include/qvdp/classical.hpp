#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qvdp/fock.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/ode.hpp"

namespace qvdp {

/// Mean-field amplitude alpha = <a> at time t.
struct ClassicalState {
  cplx alpha;
  double t = 0.0;
};

/// d alpha/dt = (-(kappa - gain)/2 + i delta) alpha - eta |alpha|^2 alpha - i eps
cplx vdp_rhs(cplx alpha, const SystemParams& p);

/// Hopf point in eps*sqrt(eta) from the small-eta estimate
/// sqrt((g - kappa)((g - kappa)^2 + 4 delta^2)) / 4.
/// Errc::no_bifurcation when gain < kappa.
double hopf_threshold(const SystemParams& p);

struct FixedPoint {
  cplx alpha;
  bool stable = false;
  std::array<cplx, 2> jacobian_eigenvalues;
};

/// All fixed points of the mean-field flow. |alpha|^2 solves the cubic
/// n((a - eta n)^2 + delta^2) = |eps|^2 with a = (gain - kappa)/2; each root
/// is Newton-polished on the complex equation.
std::vector<FixedPoint> fixed_points(const SystemParams& p);

/// The stable fixed point when one exists (the one of largest |alpha| if
/// several are stable), otherwise the unstable one inside the limit cycle.
FixedPoint fixed_point(const SystemParams& p);

OdeOptions classical_ode_defaults();

std::vector<ClassicalState> integrate(cplx alpha0, const SystemParams& p,
                                      const std::vector<double>& t_grid,
                                      const OdeOptions& opts = classical_ode_defaults());

/// alpha(t_end) from alpha(t0).
cplx propagate(cplx alpha0, const SystemParams& p, double duration,
               const OdeOptions& opts = classical_ode_defaults());

struct LimitCycleOptions {
  double t_burn = 0.0;        // <= 0 selects 20/(gain - kappa)
  double section_angle = 0.0;  // Poincare ray {arg(alpha - c) = angle}
  int samples = 512;          // points over one period
  int max_periods = 4000;
  double closure_tol = 1e-6;  // relative to max |alpha|
  OdeOptions ode = classical_ode_defaults();
};

struct LimitCycle {
  std::vector<ClassicalState> points;  // one period, uniform in time
  double period = 0.0;
  double freq = 0.0;  // 2 pi / period
  cplx centroid;
  double mean_radius = 0.0;  // mean |alpha - centroid|
  double floquet_multiplier = 0.0;
};

/// Attracting periodic orbit via Poincare first returns to a ray through
/// the running centroid. Errc::not_in_limit_cycle when the flow settles on a
/// fixed point or the cycle is not attracting.
LimitCycle limit_cycle(const SystemParams& p, const LimitCycleOptions& opts = {});

/// Distance from alpha to the closed polyline through the cycle points.
double distance_to_cycle(const LimitCycle& cycle, cplx alpha);

/// Angular extent (about the centroid) covered by the samples: 2 pi minus
/// the largest empty angular gap.
double occupied_arc(const LimitCycle& cycle, const std::vector<cplx>& samples);

struct EnsembleOptions {
  // Per-quadrature standard deviation of the vacuum Husimi Gaussian.
  double sigma = 0.70710678118654752440;
  int workers = 1;
  OdeOptions ode = classical_ode_defaults();
};

/// Initial amplitude of trajectory `index`: a Box-Muller pair drawn from a
/// generator keyed by (seed, index) alone.
cplx sample_vacuum(std::uint64_t seed, std::uint64_t index, double sigma);

struct ClassicalEnsemble {
  std::uint64_t seed = 0;
  int n_traj = 0;
  double t_query = 0.0;
  std::vector<cplx> initial;
  std::vector<cplx> samples_t;
};

/// Identical output for any worker count.
ClassicalEnsemble mc_ensemble(const SystemParams& p, int n_traj, std::uint64_t seed,
                              double t_query, const EnsembleOptions& opts = {});

/// Q_cl(alpha) = mean_i exp(-|alpha - alpha_i|^2). A radius <= 0 selects
/// 1.5 sqrt(mean |alpha_i|^2) + 4.
QGrid classical_husimi(const ClassicalEnsemble& ensemble, const GridSpec& spec = {});

struct PhaseMapOptions {
  double singular_fraction = 0.05;  // of the cycle radius
  int workers = 1;
  LimitCycleOptions cycle;
};

struct PhaseMap {
  std::vector<double> re0;
  std::vector<double> im0;
  Eigen::MatrixXd phase;          // (re index, im index), in (-pi, pi]
  Eigen::MatrixXi singular;       // 1 where the trajectory missed the cycle
  cplx centroid;
  double r_cycle = 0.0;
};

/// arg(alpha(t_query) - centroid) for every initial point of the grid.
PhaseMap phase_map(const SystemParams& p, const std::vector<double>& re0,
                   const std::vector<double>& im0, double t_query,
                   const PhaseMapOptions& opts = {});

}  // namespace qvdp
